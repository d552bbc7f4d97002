use serde_json::{json, Value};

fn rational() -> Value {
    json!({ "type": "string", "pattern": "^-?[0-9]+/[0-9]+$" })
}

fn object(required: &[&str], properties: Value) -> Value {
    json!({ "type": "object", "required": required, "properties": properties })
}

fn closed(mut schema: Value) -> Value {
    schema["additionalProperties"] = json!(false);
    schema
}

fn array(items: Value) -> Value {
    json!({ "type": "array", "items": items })
}

fn frequencies() -> Value {
    object(
        &["radius", "frequencies"],
        json!({
            "radius": { "type": "integer", "minimum": 0 },
            "frequencies": { "type": "object", "additionalProperties": rational() },
        }),
    )
}

fn segment() -> Value {
    object(
        &["component", "start", "end"],
        json!({
            "component": { "type": "integer" },
            "start": { "type": "integer" },
            "end": { "type": "integer" },
        }),
    )
}

fn sparse_vector() -> Value {
    array(json!({ "type": "array", "items": { "type": "integer", "minimum": 0 }, "minItems": 2, "maxItems": 2 }))
}

fn trajectory() -> Value {
    object(
        &["label", "values", "modulus"],
        json!({ "label": { "type": "string" }, "values": array(rational()), "modulus": array(rational()) }),
    )
}

/// Schemas keyed by subcommand, plus the error report.
pub fn all() -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "validate": object(&["ok", "field", "vertices", "arrows", "basis", "dim", "nilpotency_bound"], json!({
            "ok": { "type": "boolean" },
            "field": object(&["p", "k", "order"], json!({
                "p": { "type": "integer" }, "k": { "type": "integer" }, "order": { "type": "integer" }
            })),
            "vertices": array(json!({ "type": "string" })),
            "arrows": array(object(&["label", "source", "target"], json!({
                "label": { "type": "string" }, "source": { "type": "string" }, "target": { "type": "string" }
            }))),
            "forbidden": array(json!({ "type": "string" })),
            "basis": array(json!({ "type": "string" })),
            "dim": { "type": "integer" },
            "nilpotency_bound": { "type": "integer" },
            "module": object(&["dim", "ok"], json!({
                "dim": { "type": "integer" }, "ok": { "type": "boolean" },
                "violation": { "type": ["string", "null"] }, "witness": { "type": ["string", "null"] }
            })),
        })),
        "rank": object(&["dim", "profile"], json!({
            "dim": { "type": "integer" },
            "profile": array(object(&["matrix", "value"], json!({ "matrix": { "type": "string" }, "value": rational() }))),
        })),
        "ppdim": {
            "oneOf": [
                object(&["kind", "t", "dim", "value"], json!({
                    "kind": { "const": "formula" }, "t": { "type": "integer" }, "dim": { "type": "integer" }, "value": rational()
                })),
                object(&["kind", "gap", "value"], json!({
                    "kind": { "const": "pair" }, "gap": { "type": "integer" }, "value": rational()
                })),
            ]
        },
        "stats": {
            "oneOf": [
                object(&["radius", "frequencies", "vertices", "right_endpoints"], json!({
                    "radius": { "type": "integer" },
                    "frequencies": { "type": "object", "additionalProperties": rational() },
                    "vertices": { "type": "integer" },
                    "right_endpoints": { "type": "object", "additionalProperties": object(&["count", "density"], json!({
                        "count": { "type": "integer" }, "density": rational()
                    })) },
                })),
                object(&["radius", "strings", "balls", "tolerance", "cauchy"], json!({
                    "radius": { "type": "integer" },
                    "strings": array(trajectory()),
                    "balls": array(trajectory()),
                    "tolerance": rational(),
                    "cauchy": { "type": "boolean" },
                })),
            ]
        },
        "sample": object(&["samples", "epsilon", "delta", "seed", "profile"], json!({
            "samples": { "type": "integer" },
            "epsilon": { "type": "number" },
            "delta": { "type": "number" },
            "seed": { "type": "integer" },
            "profile": frequencies(),
        })),
        "tile": object(&["tiling", "check", "ok"], json!({
            "tiling": object(&["regime", "ambient", "epsilon", "constants", "bound", "coverage", "expansion", "pieces"], json!({
                "regime": { "type": "string" },
                "ambient": { "type": "integer" },
                "epsilon": rational(),
                "constants": object(&["m", "k", "m_eps"], json!({
                    "m": { "type": "integer" }, "k": { "type": "integer" }, "m_eps": { "type": "integer" }
                })),
                "bound": { "type": "integer" },
                "coverage": rational(),
                "expansion": rational(),
                "pieces": array(object(&["label", "basis"], json!({
                    "label": { "type": "string" }, "basis": array(sparse_vector())
                }))),
            })),
            "check": object(&["independent", "coverage", "expansion", "max_piece_dim", "failures"], json!({
                "independent": { "type": "boolean" },
                "coverage": rational(),
                "expansion": rational(),
                "max_piece_dim": { "type": "integer" },
                "failures": array(json!({ "type": "string" })),
            })),
            "ok": { "type": "boolean" },
        })),
        "epsiso": {
            "oneOf": [
                object(&["outcome", "pairs", "vertices_left", "vertices_right", "covered", "epsilon_left", "epsilon_right",
                         "module_epsilon_left", "module_epsilon_right", "block"], json!({
                    "outcome": { "const": "certificate" },
                    "pairs": array(object(&["word", "left", "right"], json!({
                        "word": { "type": "string" }, "left": segment(), "right": segment()
                    }))),
                    "vertices_left": { "type": "integer" },
                    "vertices_right": { "type": "integer" },
                    "covered": { "type": "integer" },
                    "epsilon_left": rational(),
                    "epsilon_right": rational(),
                    "module_epsilon_left": rational(),
                    "module_epsilon_right": rational(),
                    "block": { "type": ["integer", "null"] },
                })),
                object(&["outcome", "best_left", "best_right", "account"], json!({
                    "outcome": { "const": "no_certificate" },
                    "best_left": rational(),
                    "best_right": rational(),
                    "account": array(json!({ "type": "string" })),
                })),
            ]
        },
        "catalog": object(&["caps", "count", "tiles"], json!({
            "caps": object(&["max_string_len", "band_dim_cap", "limit"], json!({
                "max_string_len": { "type": "integer" }, "band_dim_cap": { "type": "integer" }, "limit": { "type": "integer" }
            })),
            "count": { "type": "integer" },
            "tiles": array(object(&["index", "label", "dim", "band"], json!({
                "index": { "type": "integer" }, "label": { "type": "string" },
                "dim": { "type": "integer" }, "band": { "type": "boolean" }
            }))),
        })),
        "param": {
            "oneOf": [
                closed(object(&["parameter", "value"], json!({
                    "parameter": { "type": "string" },
                    "value": rational(),
                    "count": { "type": "integer" },
                    "top": array(json!({ "type": "integer" })),
                    "upper": { "type": "integer" },
                    "exact": { "type": "boolean" },
                    "witness": array(array(json!({ "type": "integer" }))),
                    "pp_checked": { "type": "boolean" },
                }))),
                object(&["parameter", "value", "trims", "max_trim_gap", "powers", "cauchy"], json!({
                    "parameter": { "type": "string" },
                    "value": rational(),
                    "trims": array(json!({ "type": "array", "prefixItems": [{ "type": "integer" }, rational()] })),
                    "max_trim_gap": rational(),
                    "powers": array(rational()),
                    "cauchy": array(rational()),
                })),
            ]
        },
        "build-tester": object(&["algebra", "parameter", "epsilon", "kappa", "delta", "n", "stabilized", "caps", "tests",
                                 "catalog", "values", "profiles", "ambiguous"], json!({
            "algebra": { "type": "string" },
            "parameter": { "type": "string" },
            "epsilon": rational(),
            "kappa": rational(),
            "delta": rational(),
            "n": { "type": "integer", "minimum": 1 },
            "stabilized": { "type": "boolean" },
            "caps": { "type": "object" },
            "tests": array(json!({ "type": "string" })),
            "catalog": array(json!({ "type": "string" })),
            "values": array(rational()),
            "profiles": array(array(rational())),
            "ambiguous": array(array(json!({ "type": "integer" }))),
        })),
        "test": object(&["tile", "label", "value", "radius", "parameter", "kappa"], json!({
            "tile": { "type": "integer" },
            "label": { "type": "string" },
            "value": rational(),
            "radius": rational(),
            "parameter": { "type": "string" },
            "kappa": rational(),
        })),
        "error": object(&["error"], json!({
            "error": object(&["kind", "code", "message"], json!({
                "kind": { "enum": ["parse", "precondition", "budget"] },
                "code": { "enum": [2, 3, 4] },
                "message": { "type": "string" },
            })),
        })),
    })
}
