import pandas as pd

from gpsing.common.problem import derived_constants, epsilon_of, tilde_I_closed, validate_params

pd.set_option("display.width", 120)


# =========================================
# Closed-form constants across the regime
# =========================================

CASES = [
    (1, 2.0, 0.5),
    (1, 3.0, 0.5),
    (2, 1.5, 0.5),
    (2, 1.8, 1.0),
    (3, 1.2, 0.5),
    (3, 1.3, 1.5),
]

records = []
for N, p, b in CASES:
    constants = derived_constants(validate_params(N, p, b))
    records.append({
        "N": N, "p": p, "b": b,
        "p_upper": 1 + (4 - 2 * b) / N,
        "lambda0": constants.lambda0,
        "beta_energy": constants.beta_energy,
        "beta_length": constants.beta_length,
        "kinetic_ratio": constants.kinetic_ratio,
    })

print(pd.DataFrame(records).to_string(index=False))


# =====================================================
# Trap-free energy and blow-up length, a_star fixed at 1
# =====================================================

params = validate_params(1, 2.0, 0.5)
A_STAR = 1.0

records = []
for M in (1.0, 10.0, 100.0, 1e3, 1e4):
    records.append({
        "M": M,
        "tilde_I": tilde_I_closed(params, A_STAR, M),
        "eps": epsilon_of(params, A_STAR, M),
        "c_gn": derived_constants(params, a_star=A_STAR).c_gn,
    })

print()
print(pd.DataFrame(records).to_string(index=False))
