"""JSON schemas of the files written by the command-line runner."""

_num = {"type": "number"}
_num_or_null = {"type": ["number", "null"]}
_int_or_null = {"type": ["integer", "null"]}

REGIME = {
    "type": "object",
    "required": ["kind", "l_crit", "thresholds", "omega_o"],
    "properties": {
        "kind": {
            "enum": ["GlobalMax", "ConstrainedMin", "Saddle", "SpecialSaddle", "DegenerateBoundary"]
        },
        "l_crit": _int_or_null,
        "thresholds": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        "omega_o": _num,
    },
}

FUNCTIONALS = {
    "type": "object",
    "required": [
        "energy_E",
        "angular_momentum_Lambda",
        "pseudo_energy_H",
        "shifted_H",
        "rel_enstrophy",
        "total_enstrophy",
        "circulation",
    ],
    "additionalProperties": False,
    "properties": {
        k: _num
        for k in (
            "energy_E",
            "angular_momentum_Lambda",
            "pseudo_energy_H",
            "shifted_H",
            "rel_enstrophy",
            "total_enstrophy",
            "circulation",
        )
    },
}

EXTREMAL = {
    "type": "object",
    "required": ["branch", "lambda_rel", "alpha_10", "energy_original", "energy_shifted", "regime"],
    "properties": {
        "branch": {"type": "string"},
        "lambda_rel": _num,
        "alpha_10": _num,
        "truncation": {"type": "integer"},
        "energy_original": _num,
        "energy_shifted": _num,
        "regime": REGIME,
    },
}

EL_SOLUTION = {
    "type": "object",
    "required": ["kind", "lambda_rel", "omega", "coefficient", "kernel_degree", "kernel_dim", "branch"],
    "properties": {
        "kind": {"enum": ["unique", "family", "none"]},
        "lambda_rel": _num,
        "omega": _num,
        "coefficient": _num_or_null,
        "kernel_degree": _int_or_null,
        "kernel_dim": {"type": "integer"},
        "branch": {"type": ["string", "null"]},
        "residual": _num_or_null,
    },
}

ORACLE = {
    "type": "object",
    "required": [
        "converged",
        "iterations",
        "final_energy",
        "gradient_norm",
        "distance_to_analytic",
        "verification",
    ],
    "properties": {
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer"},
        "final_energy": _num,
        "gradient_norm": _num,
        "distance_to_analytic": _num,
        "verification": {
            "type": "object",
            "required": ["ok", "distance", "energy_difference", "reason"],
        },
        "hessian": {
            "type": ["object", "null"],
            "properties": {
                "lambda_star": _num,
                "positive_count": {"type": "integer"},
                "negative_count": {"type": "integer"},
                "zero_count": {"type": "integer"},
                "curvatures": {"type": "array"},
            },
        },
    },
}

TRAJECTORY = {
    "type": "object",
    "required": ["params", "truncation", "dt", "filter", "samples", "blew_up"],
    "properties": {
        "params": {
            "type": "object",
            "required": ["omega", "q_rel"],
            "properties": {"omega": _num, "q_rel": _num},
        },
        "truncation": {"type": "integer"},
        "dt": _num,
        "filter": {"type": "boolean"},
        "samples": {"type": "integer"},
        "blew_up": {"type": "boolean"},
        "drift": {"type": "object"},
    },
}

PROBE = {
    "allOf": [
        TRAJECTORY,
        {
            "type": "object",
            "required": ["verdict", "sup_ratio", "tilt_growth", "total_growth", "regime"],
            "properties": {
                "verdict": {"enum": ["Stable", "Unstable", "Inconclusive"]},
                "sup_ratio": _num,
                "tilt_growth": _num,
                "total_growth": _num,
                "regime": REGIME,
            },
        },
    ]
}

EXTREMALS = {
    "type": "object",
    "required": ["H_Max", "H_min", "lambda_plus", "lambda_minus", "max", "min"],
    "properties": {
        "H_Max": _num,
        "H_min": _num,
        "lambda_plus": _num,
        "lambda_minus": _num,
        "max": EXTREMAL,
        "min": EXTREMAL,
        "max_functionals": FUNCTIONALS,
        "min_functionals": FUNCTIONALS,
    },
}

FIGURES = {
    "type": "object",
    "required": ["figures"],
    "properties": {
        "figures": {
            "type": "object",
            "patternProperties": {
                "^fig[1-4]$": {"type": "object", "required": ["csv", "rows"]},
            },
            "additionalProperties": False,
        }
    },
}

RESULT_SCHEMAS = {
    "classify": REGIME,
    "extremals": EXTREMALS,
    "solve-el": EL_SOLUTION,
    "oracle": ORACLE,
    "evolve": TRAJECTORY,
    "probe": PROBE,
    "figures": FIGURES,
}


def document_schema(command: str) -> dict:
    """Schema of the full JSON document written for ``command``."""
    return {
        "type": "object",
        "required": ["command", "version", "params", "status", "result", "files"],
        "properties": {
            "command": {"const": command},
            "version": {"type": "string"},
            "params": {"type": "object", "required": ["command", "omega", "q_rel", "L", "seed"]},
            "status": {"enum": [0, 1]},
            "result": RESULT_SCHEMAS[command],
            "files": {"type": "array", "items": {"type": "string"}},
        },
    }
