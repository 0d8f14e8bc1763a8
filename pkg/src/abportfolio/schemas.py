"""JSON schemas for CLI spec files and JSON outputs.

Every object is closed (``additionalProperties: false``) so that a
misspelled key fails validation instead of being silently ignored.
"""

import copy

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_INT0 = {"type": "integer", "minimum": 0}
_INT1 = {"type": "integer", "minimum": 1}

DEFINITIONS = {
    "prior": {
        "type": "object",
        "properties": {
            "type": {"enum": ["gaussian", "discrete"]},
            "mu": _NUM,
            "tau": _POS,
            "values": {"type": "array", "items": _NUM, "minItems": 1},
            "weights": {"type": "array", "items": _NONNEG, "minItems": 1},
        },
        "required": ["type"],
        "additionalProperties": False,
        "allOf": [
            {"if": {"properties": {"type": {"const": "gaussian"}}}, "then": {"required": ["mu", "tau"]}},
            {"if": {"properties": {"type": {"const": "discrete"}}}, "then": {"required": ["values", "weights"]}},
        ],
    },
    "gaussian_prior": {
        "type": "object",
        "properties": {"type": {"const": "gaussian"}, "mu": _NUM, "tau": _POS},
        "required": ["type", "mu", "tau"],
        "additionalProperties": False,
    },
    "utility": {
        "type": "object",
        "properties": {"type": {"enum": ["linear", "loss_averse"]}, "b": _NONNEG},
        "required": ["type"],
        "additionalProperties": False,
        "if": {"properties": {"type": {"const": "loss_averse"}}},
        "then": {"required": ["b"]},
    },
    "cost": {
        "type": "object",
        "properties": {"implementation": _NONNEG, "testing_fixed": _NONNEG},
        "additionalProperties": False,
    },
    "n_grid": {
        "oneOf": [
            {"type": "array", "items": {"type": "number", "minimum": 1}, "minItems": 1},
            {
                "type": "object",
                "properties": {
                    "min": {"type": "number", "minimum": 1},
                    "max": {"type": "number", "minimum": 1},
                    "points": {"type": "integer", "minimum": 1, "maximum": 100000},
                    "scale": {"enum": ["log", "linear"]},
                },
                "required": ["min", "max", "points"],
                "additionalProperties": False,
            },
        ]
    },
    "int_list": {"type": "array", "items": _INT1, "minItems": 1},
    "weights": {
        "oneOf": [
            {"enum": ["equal", "remaining"]},
            {"type": "array", "items": _NONNEG, "minItems": 1},
        ]
    },
    "program": {
        "type": "object",
        "properties": {
            "name": {"type": "string", "minLength": 1},
            "prior": {"$ref": "#/definitions/prior"},
            "sigma": _POS,
            "I": _INT0,
            "N": _INT0,
            "weight": _POS,
            "utility": {"$ref": "#/definitions/utility"},
            "cost": {"$ref": "#/definitions/cost"},
        },
        "required": ["name", "prior", "sigma"],
        "additionalProperties": False,
    },
    "record": {
        "type": "object",
        "properties": {"delta_hat": _NUM, "n": _INT1},
        "required": ["delta_hat", "n"],
        "additionalProperties": False,
    },
}

_REF = {name: {"$ref": f"#/definitions/{name}"} for name in DEFINITIONS}
_SEED = {"seed": _INT0}
_MODEL = {"prior": _REF["prior"], "sigma": _POS, "utility": _REF["utility"], "cost": _REF["cost"]}


def _spec(properties, required):
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "properties": {**properties, **_SEED},
        "required": required,
        "additionalProperties": False,
        "definitions": copy.deepcopy(DEFINITIONS),
    }


_EXCLUSIVE = {
    "prior": _REF["gaussian_prior"],
    "sigma": _POS,
    "N": _INT1,
    "I": _INT1,
    "method": {"enum": ["monte_carlo", "quadrature", "approx", "approx_scaled"]},
    "samples": {"type": "integer", "minimum": 1000},
    "I0_grid": _REF["int_list"],
}

SPEC_SCHEMAS = {
    "fit-prior": _spec(
        {"sigma": _POS, "records": {"type": "array", "items": _REF["record"]}, "records_path": {"type": "string"}},
        ["sigma"],
    ),
    "production-curve": _spec({**_MODEL, "n_grid": _REF["n_grid"], "z": _NUM}, ["prior", "sigma", "n_grid"]),
    "allocate": _spec(
        {
            "prior": _REF["prior"],
            "sigma": _POS,
            "utility": _REF["utility"],
            "costs": _REF["cost"],
            "I": _INT1,
            "N": _INT1,
            "c0": _INT1,
            "k": _INT1,
            "frontier": {"type": "boolean"},
        },
        ["prior", "sigma", "I", "N"],
    ),
    "thresholds": _spec({**_MODEL, "n_grid": _REF["n_grid"]}, ["prior", "sigma", "n_grid"]),
    "cost-analysis": _spec(
        {
            "prior": _REF["gaussian_prior"],
            "sigma": _POS,
            "n": {"type": "number", "minimum": 1},
            "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}, "minItems": 1},
            "b_cap": _POS,
        },
        ["prior", "sigma", "n", "alphas"],
    ),
    "multi-program": _spec(
        {"N": _INT1, "block": _INT1, "programs": {"type": "array", "items": _REF["program"], "minItems": 1}},
        ["N", "programs"],
    ),
    "share-ideas": _spec(
        {"I": _INT0, "programs": {"type": "array", "items": _REF["program"], "minItems": 1}},
        ["I", "programs"],
    ),
    "sequential": _spec(
        {"program": _REF["program"], "N": _INT1, "I": _INT0, "T": _INT1, "weights": _REF["weights"]},
        ["program", "N", "I", "T"],
    ),
    "exclusive": _spec(_EXCLUSIVE, ["prior", "sigma", "N", "I"]),
    "minimax": _spec(
        {"sigma": _POS, "allocations": _REF["int_list"], "I": _INT1, "N": _INT1},
        ["sigma"],
    ),
}

FIGURE_SCHEMAS = {
    "value-of-testing": _spec({**_MODEL, "N": _INT1, "I": _INT1}, ["prior", "sigma", "N", "I"]),
    "test-passing": _spec({"prior": _REF["gaussian_prior"], "sigma": _POS, "n_grid": _REF["n_grid"]}, ["prior", "sigma", "n_grid"]),
    "p005-comparison": _spec({**_MODEL, "n_grid": _REF["n_grid"], "z": _NUM}, ["prior", "sigma", "n_grid"]),
    "metaproduction-heatmap": _spec(
        {**_MODEL, "I_grid": _REF["int_list"], "N_grid": _REF["int_list"], "bracket_hi": _POS},
        ["prior", "sigma", "I_grid", "N_grid"],
    ),
    "cost-threshold": _spec(
        {"prior": _REF["prior"], "sigma": _POS, "n": {"type": "number", "minimum": 1},
         "costs": {"type": "array", "items": _NONNEG, "minItems": 1}},
        ["prior", "sigma", "n", "costs"],
    ),
    "utility-threshold": _spec(
        {"prior": _REF["prior"], "sigma": _POS, "n": {"type": "number", "minimum": 1},
         "b_grid": {"type": "array", "items": _NONNEG, "minItems": 1}},
        ["prior", "sigma", "n", "b_grid"],
    ),
    "program-curves": _spec(
        {"programs": {"type": "array", "items": _REF["program"], "minItems": 1}, "N_grid": _REF["int_list"], "block": _INT1},
        ["programs", "N_grid"],
    ),
    "sequential-surface": _spec(
        {"program": _REF["program"], "N": _INT1, "I_grid": {"type": "array", "items": _INT0, "minItems": 1},
         "T_grid": _REF["int_list"], "weights": {"enum": ["equal", "remaining"]}},
        ["program", "N", "I_grid", "T_grid"],
    ),
    "exclusive-curve": _spec(_EXCLUSIVE, ["prior", "sigma", "N", "I"]),
}

_META = {
    "type": "object",
    "properties": {
        "spec_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "seed": _INT0,
        "version": {"type": "string"},
        "command": {"type": "string"},
    },
    "required": ["spec_sha256", "seed", "version", "command"],
    "additionalProperties": False,
}
_NULLNUM = {"type": ["number", "null"]}
_TABLE = {
    "columns": {"type": "array", "items": {"type": "string"}},
    "rows": {"type": "array", "items": {"type": "array"}},
}


def _out(properties, required):
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "properties": {"meta": _META, **properties},
        "required": ["meta", *required],
        "additionalProperties": False,
    }


_RUNS = {"type": "array", "items": {"type": "array", "items": _INT0, "minItems": 2, "maxItems": 2}}

OUTPUT_SCHEMAS = {
    "fit-prior": _out(
        {k: _NULLNUM for k in ("mu", "tau", "tau2", "se_mu", "se_tau", "se_tau2", "loglik")}
        | {"n_records": _INT1, "degenerate": {"type": "boolean"}},
        ["mu", "tau", "tau2", "se_mu", "se_tau2", "loglik", "n_records", "degenerate"],
    ),
    "production-curve": _out(_TABLE, ["columns", "rows"]),
    "allocate": _out(
        {"value": _NUM, "allocation": _RUNS, "tests_run": _INT0, "k": _INT1, "c0": _INT1},
        ["value", "allocation", "tests_run"],
    ),
    "thresholds": _out(_TABLE | {"saturation": {"type": "array", "items": {"enum": [None, "never", "always"]}}},
                       ["columns", "rows", "saturation"]),
    "cost-analysis": _out(_TABLE | {"notes": {"type": "array", "items": {"type": ["string", "null"]}}},
                          ["columns", "rows", "notes"]),
    "multi-program": _out(
        {
            "value": _NUM,
            "programs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"name": {"type": "string"}, "units": _INT0, "value": _NUM, "allocation": _RUNS},
                    "required": ["name", "units", "value", "allocation"],
                    "additionalProperties": False,
                },
            },
        },
        ["value", "programs"],
    ),
    "share-ideas": _out(
        {
            "value": _NUM,
            "programs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"name": {"type": "string"}, "ideas": _INT0, "value": _NUM},
                    "required": ["name", "ideas", "value"],
                    "additionalProperties": False,
                },
            },
        },
        ["value", "programs"],
    ),
    "sequential": _out(
        {
            "value": _NUM,
            "periods": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"t": _INT1, "ideas": _INT0, "weight": _NUM, "value": _NUM},
                    "required": ["t", "ideas", "weight", "value"],
                    "additionalProperties": False,
                },
            },
        },
        ["value", "periods"],
    ),
    "exclusive": _out(_TABLE | {"best_I0": _INT1, "best_value": _NUM}, ["columns", "rows", "best_I0", "best_value"]),
    "minimax": _out(
        {"C": _NUM, "nu_star": _NUM, "risk": _NULLNUM, "equal_split": {"type": ["array", "null"], "items": _INT1},
         "equal_split_risk": _NULLNUM},
        ["C", "nu_star"],
    ),
    "figures": _out(
        {"family": {"enum": sorted(FIGURE_SCHEMAS)}, "files": {"type": "array", "items": {"type": "string"}}},
        ["family", "files"],
    ),
}
