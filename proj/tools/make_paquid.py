#!/usr/bin/env python3
"""Write data/paquid.csv: a deterministic stand-in shaped like the lcmm Paquid table.

500 subjects, 2,250 visit rows, 12 columns, exactly 726 missing cells (written as NA).
"""
import random
import sys

COLUMNS = ["ID", "dem", "agedem", "age", "age_init", "CEP", "male",
           "MMSE", "BVRT", "IST", "HIER", "CESD"]
SUBJECTS = 500
ROWS = 2250
# Missing cells per column; sums to 726.
MISSING = {"MMSE": 38, "BVRT": 141, "IST": 40, "HIER": 10, "CESD": 497}


def main(path):
    rng = random.Random(19940301)
    visits = [4] * SUBJECTS
    for i in rng.sample(range(SUBJECTS), ROWS - 4 * SUBJECTS):
        visits[i] += 1
    assert sum(visits) == ROWS

    rows = []
    for sid in range(1, SUBJECTS + 1):
        age_init = round(rng.uniform(65.0, 92.0), 3)
        cep = 1 if rng.random() < 0.72 else 0
        male = 1 if rng.random() < 0.42 else 0
        dem = 1 if rng.random() < 0.3 else 0
        base = rng.randint(18, 30)
        age = age_init
        ages = []
        for _ in range(visits[sid - 1]):
            ages.append(age)
            age = round(age + rng.uniform(1.5, 4.5), 3)
        agedem = round(ages[-1] + rng.uniform(0.2, 3.0), 3) if dem else round(ages[-1] + 1.0, 3)
        for v, a in enumerate(ages):
            decline = v * rng.randint(0, 3 if dem else 1)
            mmse = max(0, min(30, base - decline + rng.randint(-2, 2)))
            rows.append({
                "ID": str(sid), "dem": str(dem), "agedem": f"{agedem:g}",
                "age": f"{a:g}", "age_init": f"{age_init:g}", "CEP": str(cep),
                "male": str(male), "MMSE": str(mmse),
                "BVRT": str(max(0, min(15, 11 - v + rng.randint(-3, 3)))),
                "IST": str(max(0, min(40, 28 + rng.randint(-10, 8) - v))),
                "HIER": str(rng.choice([0, 0, 0, 1, 1, 2, 3])),
                "CESD": str(max(0, min(52, int(rng.expovariate(1 / 9.0))))),
            })

    for col, n in MISSING.items():
        for r in rng.sample(range(ROWS), n):
            rows[r][col] = "NA"

    with open(path, "w", newline="") as f:
        f.write(",".join(COLUMNS) + "\n")
        for r in rows:
            f.write(",".join(r[c] for c in COLUMNS) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/paquid.csv")
