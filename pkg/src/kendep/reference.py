"""Published reference values used by the reproduction harness.

Everything here is plain data.  Means of the index simulations are keyed by
table identifier; each entry lists the Monte Carlo means of ``I_hat`` and
``I_hat_star`` at ``INDEX_SAMPLE_SIZES`` together with the population values
of ``I`` and ``I*`` for the generating law.  Rejection rates are percentages.
"""

from __future__ import annotations

from .independence import CONFIDENCE_LEVELS, PERCENTILE_TABLE_D2, SIGMA_TABLE

__all__ = [
    "CONFIDENCE_LEVELS",
    "PERCENTILE_TABLE_D2",
    "SIGMA_TABLE",
    "INDEX_SAMPLE_SIZES",
    "INDEX_TABLES",
    "BIOMARKER_FULL",
    "BIOMARKER_PAIRS",
    "BIOMARKER_TRIPLES",
    "POWER_SAMPLE_SIZES",
    "POWER_NORMAL",
    "POWER_NON_NORMAL",
    "NORMAL3_INDEX",
]

INDEX_SAMPLE_SIZES = (100, 200, 500, 1000)


def _normal(r12, r13, r23):
    return {"family": "normal3", "params": {"rho12": r12, "rho13": r13, "rho23": r23}}


def _copula(family, theta):
    return {"family": family, "params": {"theta": theta}}


def _fgm(variant, theta):
    return {"family": "fgm", "params": {"variant": variant, "theta": theta}}


def _entry(label, law, I_means, I_star_means, true_values):
    return {"label": label, **law, "I": I_means, "I_star": I_star_means, "true": true_values}


INDEX_TABLES = {
    # Trivariate normal with correlations (rho12, rho13, rho23).
    "T3a": _entry("N3 (0, 0, 0)", _normal(0, 0, 0),
                  (.097, .059, .032, .022), (.186, .109, .057, .037), (0.0, 0.0)),
    "T3b": _entry("N3 (1, 1, 1)", _normal(1, 1, 1),
                  (.739, .833, .912, .947), (.985, .994, .998, .999), (1.0, 1.0)),
    "T3c": _entry("N3 (-0.5, -0.5, 0.5)", _normal(-.5, -.5, .5),
                  (.222, .229, .236, .239), (.459, .472, .487, .493), (.243, .5)),
    "T3d": _entry("N3 (-0.5, -0.5, -0.5)", _normal(-.5, -.5, -.5),
                  (.418, .464, .505, .525), (.794, .846, .885, .900), (.554, .92)),
    "T3e": _entry("N3 (0.1, 0.2, -0.9)", _normal(.1, .2, -.9),
                  (.382, .413, .438, .449), (.745, .787, .818, .829), (.461, .842)),
    "T3f": _entry("N3 (0.7, 0.5, 0)", _normal(.7, .5, 0),
                  (.311, .330, .348, .355), (.631, .664, .693, .704), (.363, .717)),
    "T3g": _entry("N3 (0.2, -0.8, 0)", _normal(.2, -.8, 0),
                  (.291, .307, .322, .327), (.594, .624, .651, .659), (.334, .671)),
    "T3h": _entry("N3 (-0.3, -0.3, -0.3)", _normal(-.3, -.3, -.3),
                  (.192, .192, .197, .200), (.395, .395, .406, .412), (.204, .420)),
    "T3i": _entry("N3 (0.2, 0.3, 0.4)", _normal(.2, .3, .4),
                  (.165, .156, .156, .157), (.336, .316, .317, .319), (.159, .324)),
    "T3j": _entry("N3 (-0.1, -0.1, 0.2)", _normal(-.1, -.1, .2),
                  (.114, .089, .077, .075), (.224, .170, .146, .141), (.074, .138)),
    # Trivariate Archimedean copulas.
    "T4a": _entry("Clayton 2", _copula("clayton", 2.0),
                  (.315, .332, .348, .354), (.637, .666, .694, .703), (.362, .715)),
    "T4b": _entry("Clayton 5", _copula("clayton", 5.0),
                  (.442, .479, .507, .517), (.821, .860, .886, .893), (.528, .903)),
    "T4c": _entry("Frank 4", _copula("frank", 4.0),
                  (.241, .247, .255, .260), (.497, .510, .527, .535), (.263, .543)),
    "T4d": _entry("Frank 8", _copula("frank", 8.0),
                  (.354, .378, .396, .403), (.702, .739, .764, .774), (.410, .783)),
    "T4e": _entry("Gumbel 2", _copula("gumbel", 2.0),
                  (.316, .333, .348, .354), (.638, .668, .693, .703), (.361, .714)),
    "T4f": _entry("Gumbel 4", _copula("gumbel", 4.0),
                  (.471, .509, .539, .550), (.853, .887, .910, .918), (.562, .925)),
    "T4g": _entry("Joe 2", _copula("joe", 2.0),
                  (.240, .248, .258, .262), (.495, .512, .532, .540), (.267, .549)),
    "T4h": _entry("Joe 5", _copula("joe", 5.0),
                  (.416, .449, .475, .484), (.790, .829, .857, .866), (.496, .876)),
    # Trivariate FGM copulas.
    "T5a": _entry("FGM C 0.5", _fgm("C", .5),
                  (.105, .075, .059, .055), (.205, .141, .108, .100), (.052, .093)),
    "T5b": _entry("FGM C 0.7", _fgm("C", .7),
                  (.110, .087, .076, .074), (.220, .167, .144, .138), (.073, .136)),
    "T5c": _entry("FGM C 0.9", _fgm("C", .9),
                  (.123, .102, .095, .094), (.245, .198, .184, .181), (.094, .180)),
    "T5d": _entry("FGM C 1", _fgm("C", 1.0),
                  (.129, .110, .105, .104), (.257, .216, .204, .203), (.104, .203)),
    "T5e": _entry("FGM Ctilde 0.5", _fgm("Ctilde", .5),
                  (.098, .062, .037, .028), (.189, .114, .065, .049), (.020, .033)),
    "T5f": _entry("FGM Ctilde 0.7", _fgm("Ctilde", .7),
                  (.098, .063, .041, .034), (.190, .117, .074, .059), (.028, .048)),
    "T5g": _entry("FGM Ctilde 0.9", _fgm("Ctilde", .9),
                  (.099, .066, .046, .040), (.192, .121, .082, .071), (.035, .062)),
    "T5h": _entry("FGM Ctilde 1", _fgm("Ctilde", 1.0),
                  (.100, .067, .049, .043), (.194, .125, .088, .077), (.039, .070)),
}

# Biomarker data (n = 208): full-vector index and its standardized value.
BIOMARKER_FULL = {"columns": ("DB", "AST", "ALT", "AP"), "I": 0.2546, "I_star": 0.561}

# (columns, I_hat, I_hat_star, tau_hat)
BIOMARKER_PAIRS = (
    (("DB", "AST"), 0.176, 0.354, 0.215),
    (("DB", "ALT"), 0.112, 0.230, 0.092),
    (("DB", "AP"), 0.099, 0.204, 0.061),
    (("AST", "ALT"), 0.468, 0.792, 0.619),
    (("AST", "AP"), 0.083, 0.171, 0.097),
    (("ALT", "AP"), 0.069, 0.142, 0.077),
)

# (columns, I_hat, I_hat_star)
BIOMARKER_TRIPLES = (
    (("DB", "AST", "ALT"), 0.322, 0.651),
    (("DB", "AST", "AP"), 0.146, 0.294),
    (("DB", "ALT", "AP"), 0.118, 0.232),
    (("AST", "ALT", "AP"), 0.296, 0.605),
)

POWER_SAMPLE_SIZES = (50, 100, 200, 300, 500, 750, 1000, 1500, 2000)

# Rejection rates (%) at alpha = 0.05 for bivariate normals with correlation rho.
POWER_NORMAL = {
    0.0: (5.2, 4.9, 4.8, 4.9, 5.0, 5.1, 4.9, 5.1, 5.0),
    0.1: (14.7, 22.0, 32.1, 42.9, 62.1, 76.6, 86.5, 95.2, 98.2),
    0.2: (35.2, 54.5, 80.4, 93.3, 99.0, 99.9, 100, 100, 100),
    0.3: (59.2, 84.8, 98.9, 100, 100, 100, 100, 100, 100),
    0.4: (84.6, 97.6, 100, 100, 100, 100, 100, 100, 100),
    0.5: (95.6, 99.9, 100, 100, 100, 100, 100, 100, 100),
    0.6: (99.4, 100, 100, 100, 100, 100, 100, 100, 100),
}

# Rejection rates (%) for bivariate non-normal laws: label -> (family, params, rates).
# Rows whose generating recipe is not fully specified are omitted.
POWER_NON_NORMAL = {
    "exp{2,3,1.3}": ("exp", {"l1": 2.0, "l2": 3.0, "l12": 1.3},
                     (97.3, 100, 100, 100, 100, 100, 100, 100, 100)),
    "t5": ("t5", {}, (93.4, 99.9, 100, 100, 100, 100, 100, 100, 100)),
    "Morgenstern{0.5}": ("morgenstern", {"alpha": 0.5},
                         (27.4, 42.7, 66.1, 82.1, 95.8, 99.0, 99.9, 100, 100)),
    "Morgenstern{5}": ("morgenstern", {"alpha": 5.0}, (100,) * 9),
    "Plackett{1.25}": ("plackett", {"s": 1.25},
                       (11.4, 14.1, 22.9, 29.5, 40.3, 53.2, 68.7, 82.0, 90.5)),
    "Plackett{2}": ("plackett", {"s": 2.0},
                    (46.8, 70.4, 92.1, 98.7, 99.9, 100, 100, 100, 100)),
    "AliHaq{0.1,0.5}": ("alihaq", {"a": 0.1, "p": 0.5},
                        (17.2, 26.3, 39.0, 51.7, 69.0, 84.6, 92.4, 99.1, 100)),
    "AliHaq{0.9,0.5}": ("alihaq", {"a": 0.9, "p": 0.5}, (100,) * 9),
    "Gumbel{0.9}": ("gumbel_exp", {"e": 0.9},
                    (22.1, 35.3, 52.6, 68.1, 85.9, 95.4, 98.7, 100, 100)),
    "U{C(0,1)}": ("circle", {}, (0.0, 0.2, 1.1, 3.1, 9.3, 16.0, 36.9, 69.0, 86.1)),
}

# Population index I(rho) of N3(0, Sigma_3(rho)).
NORMAL3_INDEX = {
    0.0: 0.0, 0.05: 0.027, 0.10: 0.052, 0.15: 0.077, 0.20: 0.101, 0.25: 0.124,
    0.30: 0.148, 0.35: 0.171, 0.40: 0.194, 0.45: 0.218, 0.50: 0.243, 0.55: 0.267,
    0.60: 0.294, 0.65: 0.321, 0.70: 0.352, 0.75: 0.385, 0.80: 0.423, 0.85: 0.467,
    0.90: 0.524, 0.95: 0.609, 0.97: 0.662, 0.98: 0.701, 0.99: 0.758, 0.995: 0.841,
    1.0: 1.0,
}
