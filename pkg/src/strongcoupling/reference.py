"""Literature reference values, transcribed digit for digit.

Entries are kept exactly as printed, including the ones that disagree
with exact recomputation; ``SUSPECT`` lists those with a short note.  Decimal
values are strings so that the printed digit count is preserved.
"""

from gmpy2 import mpq

# a_{1,j} of the instanton lattice series, j = 1..20
INSTANTON_A1 = {
    1: "-1/8", 2: "1/8", 3: "0", 4: "11/128", 5: "-23/128", 6: "295/1024",
    7: "-589/1024", 8: "39203/32768", 9: "-80723/32786", 10: "1354949/262144",
    11: "-2887747/262144", 12: "99392471/4194304", 13: "-215798295/4194304",
    14: "3781670831/33554432", 15: "-8349041385/33554432",
    16: "1188129285795/2147483648", 17: "-2659104132291/2147483648",
    18: "47890245452569/17179869184", 19: "-108383753179167/17179869184",
    20: "39433620359113981/274877906944",
}

# leading terms of the site-1 instanton series as written in closed form
INSTANTON_A1_SERIES_TERMS = {1: "-1/2", 2: "1/8", 3: "0", 4: "11/128"}

# strong-coupling approximants S_N of the instanton series, N = 1..20
INSTANTON_PADE = {
    1: "1", 2: "0.840896415", 3: "0.781934407", 4: "0.757237797", 5: "0.740759114",
    6: "0.731210449", 7: "0.723927185", 8: "0.719045188", 9: "0.715146335",
    10: "0.712308458", 11: "0.709998411", 12: "0.708235422", 13: "0.706789935",
    14: "0.705659505", 15: "0.704734605", 16: "0.704006945", 17: "0.703419862",
    18: "0.702964717", 19: "0.702610220", 20: "0.702349024",
}
INSTANTON_PADE_MINIMUM = (24, "0.70198319")
INSTANTON_PADE_CROSSING = 41
INSTANTON_PADE_FIRST_COMPLEX_WINDOW = (52, 68)

# VPT b_0^(N) for the instanton, N = 180..199
INSTANTON_VPT = {
    180: "0.707530492", 181: "0.707524250", 182: "0.707518076", 183: "0.707511970",
    184: "0.707505930", 185: "0.707499955", 186: "0.707494044", 187: "0.707488197",
    188: "0.707482412", 189: "0.707476687", 190: "0.707471024", 191: "0.707465419",
    192: "0.707459872", 193: "0.707454384", 194: "0.707448952", 195: "0.707443575",
    196: "0.707438253", 197: "0.707432986", 198: "0.707427771", 199: "0.707422609",
}
INSTANTON_VPT_K0_200 = "18.42510"
INSTANTON_VPT_B0_200 = "0.707417"

# Richardson tables: order -> (value, convergence flag)
INSTANTON_VPT_RICHARDSON = {
    1: ("0.70640049", "decreasing"),
    2: ("0.70639983200", "increasing"),
    3: ("0.706399832082", "increasing"),
    4: ("0.7063998320858658", "increasing"),
    5: ("0.706399832085884411", "increasing"),
    6: ("0.70639983208588446498", "increasing"),
}
INSTANTON_VPT_LIMIT = "0.7063998320858845"
INSTANTON_VPT_DEVIATION_PERCENT = "0.099"

INSTANTON_A_RICHARDSON = {
    1: ("-1.4998", "increasing"),
    2: ("-1.500017", "decreasing"),
    3: ("-1.5000011", "decreasing"),
    4: ("-1.49999874", "increasing"),
    5: ("-1.5000004", "decreasing"),
    6: ("-1.499999893", "increasing"),
}
INSTANTON_K_RICHARDSON = {
    1: ("2.46692", "decreasing"),
    2: ("2.4668283", "increasing"),
    3: ("2.46682911", "decreasing"),
    4: ("2.466829065", "decreasing"),
    5: ("2.4668290597", "increasing"),
    6: ("2.4668290635", "decreasing"),
}
INSTANTON_B1_RICHARDSON = {
    1: ("0.0170837", "increasing"),
    2: ("0.0170864", "increasing"),
    3: ("0.017087", "increasing"),
    4: ("0.0170893", "increasing"),
    5: ("0.0170908", "increasing"),
    6: ("0.0170922", "increasing"),
}
INSTANTON_B2_RICHARDSON = {
    1: ("0.119069", "increasing"),
    2: ("0.119083", "increasing"),
    3: ("0.119093", "increasing"),
    4: ("0.119054095", "increasing"),
    5: ("0.119054125", "increasing"),
    6: ("0.119054146", "increasing"),
}
# K and A assumed when the B tables were produced
INSTANTON_B_K = "2.46682906"
INSTANTON_B_A = "-3/2"

INSTANTON_GROWTH = {"A": "-1.500000", "K": "2.46682906", "B1": "0.0171", "B2": "0.1190"}
ZETA_CONSISTENCY_K = "3.940"

# a_{1,j} of the Blasius lattice series, j = 1..20
BLASIUS_A1 = {
    1: "-2", 2: "2", 3: "8/3", 4: "-6", 5: "-184/15", 6: "136/9", 7: "11062/105",
    8: "-8162/225", 9: "-10557416/14175", 10: "-57628622/99225",
    11: "30868632383/5457375", 12: "6325029622/637875",
    13: "-487693745019181/13408770375", 14: "-4774319527974167/37819608750",
    15: "430321251088745734/2212447111875",
    16: "796235344548876790517/603998061541875",
    17: "-2249988054506764174584049/6776858250499837500",
    18: "-178060537619150189817796/14237097164915625",
    19: "-13224896152219729667498038639/1301909768346024337500",
    20: "121756993154067534451733120837029/1153217968487557347375000",
}

BLASIUS_PADE = {
    1: "0.5", 2: "0.4204482076", 3: "0.3948201830", 4: "0.3819443732",
    5: "0.3742062309", 6: "0.3690504811", 7: "0.3653779673", 8: "0.3626359060",
    9: "0.3605155915", 10: "0.3588309707", 11: "0.3574632121", 12: "0.3563326651",
    13: "0.3553848048", 14: "0.3545795944", 15: "0.3538882842", 16: "0.3532891509",
    17: "0.3527655813", 18: "0.3523046588", 19: "0.3518961929", 20: "0.3515320399",
}
BLASIUS_PADE_RICHARDSON = {
    1: ("0.3445", "decreasing"),
    2: ("0.3436", "decreasing"),
    3: ("0.3430", "oscillating"),
}
BLASIUS_PADE_RICHARDSON_TERMS = 70

BLASIUS_VPT = {
    180: "0.33696017793094", 181: "0.33696012777085", 182: "0.33696007843082",
    183: "0.33696002989308", 184: "0.33695998214034", 185: "0.33695993515575",
    186: "0.33695988892292", 187: "0.33695984342591", 188: "0.33695979864918",
    189: "0.33695975457760", 190: "0.33695971119646", 191: "0.33695966849139",
    192: "0.33695962644843", 193: "0.33695958505396", 194: "0.33695954429471",
    195: "0.33695950415774", 196: "0.33695946463046", 197: "0.33695942570058",
    198: "0.33695938735612", 199: "0.33695934958540",
}
BLASIUS_VPT_B0_200 = "0.33695931237713"
BLASIUS_VPT_RICHARDSON = {
    1: ("0.3369518", "increasing"),
    2: ("0.336955563", "increasing"),
    3: ("0.336955600539", "increasing"),
    4: ("0.3369556008803", "increasing"),
    5: ("0.336955600883462", "increasing"),
    6: ("0.33695560088349232", "increasing"),
}
BLASIUS_VPT_DEVIATION_PERCENT = "1.5"

# (a, b) pairs reported to reproduce the first 300 Blasius signs
BLASIUS_SIGN_FITS = [("1.3941", "3.09"), ("1.3939", "3.11"),
                     ("7.67830", "3.031"), ("7.67686", "3.130")]
BLASIUS_PURE_COSINE_MISMATCHES = (62, 212)

BLASIUS_STRESS = "0.33206"
INSTANTON_SLOPE = "0.7071067812"

# Printed entries that disagree with exact recomputation.
SUSPECT = {
    ("INSTANTON_A1", 1): "closed-form series and the recursion both give -1/2",
    ("INSTANTON_A1", 9): "denominator 32786 is not a power of two; 32768 expected",
    ("INSTANTON_A1", 20): "numerator carries an extra digit; 3943362035913981 recomputed",
    ("INSTANTON_PADE", 5): "recomputed 0.740759139",
    ("BLASIUS_PADE", 12): "recomputed 0.3563328651",
    ("INSTANTON_B2_RICHARDSON", 1): "orders 1-3 not reproduced at the stated K and A",
    ("INSTANTON_B2_RICHARDSON", 4): "agrees to 8 digits; the 9th is sensitive to K",
    ("BLASIUS_VPT_B0_200", 0): "recomputed value agrees to 1e-13, the last two printed digits differ",
    ("BLASIUS_VPT_RICHARDSON", 1): "recomputed 0.33695191; orders 2-6 agree",
    ("BLASIUS_SIGN_FITS", 0): "misses n = 213; a score-300 point lies inside the rounding box",
    ("BLASIUS_SIGN_FITS", 2): "best score near this point is below 300",
    ("BLASIUS_SIGN_FITS", 3): "best score near this point is below 300",
    ("BLASIUS_PURE_COSINE_MISMATCHES", 0): "best b in {0, pi} fit leaves only n = 62",
}


def exact(table: dict) -> dict:
    """Rational-valued copy of a table of 'num/den' strings."""
    return {k: mpq(v) for k, v in table.items()}


def last_place(printed: str) -> mpq:
    """Value of one unit in the last printed decimal place."""
    _, _, frac = printed.strip().lstrip("+-").partition(".")
    return mpq(1, 10 ** len(frac))


def printed_value(printed: str) -> mpq:
    return mpq(printed.strip())


def printed_error(value, printed: str):
    """|value - printed| in units of the last printed place (as a float)."""
    if isinstance(value, str):
        value = mpq(value)
    elif not isinstance(value, (int, type(mpq()))):
        value = mpq(*value.as_integer_ratio())
    return float(abs(value - printed_value(printed)) / last_place(printed))


def matches_printed(value, printed: str, units: float = 1.0) -> bool:
    """True when ``value`` agrees with ``printed`` to within ``units`` of its last digit.

    One unit absorbs both rounding and truncation of the printed figure.
    """
    return printed_error(value, printed) <= units
