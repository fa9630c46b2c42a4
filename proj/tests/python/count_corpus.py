"""Independent count of the documented corpus sizes.

Terms are right-combed, t ::= a | (f a ... a t), with every leading argument
a base atom (pool variable or constant).  With A base atoms and function
symbols f of arity ar_f, the number of terms of nesting depth exactly d is

    E_0 = A,    E_d = sum_f A^(ar_f - 1) * E_{d-1}.

The ring signature has three binary functions, so E_d = 3 * A * E_{d-1}.
Atoms over a signature with the constant 0 are the equalities (= t 0), one
per term; layer 0 holds the atoms and their negations.  Each quantified
layer is cut to the layer budget B, so once every layer saturates the
corpus size is  min(2 * sum_d E_d, B) + max_depth * B.

Run directly (FVKIT_BIN pointing at the CLI, default ../../build/fvkit) to
check these counts against `fvkit corpus` output.
"""

import os
import subprocess
import sys

RING_ARITIES = (2, 2, 2)  # + - *
RING_CONSTANTS = 2        # 0 1


def term_counts(num_vars, term_depth, arities=RING_ARITIES, constants=RING_CONSTANTS):
    """E_0 .. E_term_depth for the right-combed term closure."""
    base = num_vars + constants
    counts = [base]
    for _ in range(term_depth):
        counts.append(sum(base ** (ar - 1) * counts[-1] for ar in arities))
    return counts


def atom_count(num_vars, term_depth):
    return sum(term_counts(num_vars, term_depth))


def corpus_size(max_depth, num_vars, term_depth, budget):
    """Predicted size; exact when budget <= 0 or every layer saturates."""
    layer0 = 2 * atom_count(num_vars, term_depth)
    if budget <= 0:
        if max_depth > 0:
            raise ValueError("unbudgeted quantified layers are not closed-form")
        return layer0
    return min(layer0, budget) + max_depth * budget


def cli_corpus(binary, **opts):
    args = [binary, "corpus"]
    for key, val in opts.items():
        args += ["--" + key.replace("_", "-"), str(val)]
    out = subprocess.run(args, capture_output=True, text=True, check=True)
    return [line for line in out.stdout.splitlines() if line]


def main():
    binary = os.environ.get("FVKIT_BIN")
    if not binary:
        binary = os.path.join(os.path.dirname(__file__), "..", "..", "build", "fvkit")
    checks = [
        (dict(max_depth=0, num_vars=2, term_depth=2, budget=0), corpus_size(0, 2, 2, 0)),
        (dict(max_depth=0, num_vars=3, term_depth=1, budget=0), corpus_size(0, 3, 1, 0)),
        (dict(max_depth=2, num_vars=3, term_depth=2, budget=32), corpus_size(2, 3, 2, 32)),
        (dict(max_depth=1, num_vars=2, term_depth=1, budget=16), corpus_size(1, 2, 1, 16)),
    ]
    for opts, expected in checks:
        got = len(cli_corpus(binary, **opts))
        status = "ok" if got == expected else "MISMATCH"
        print(f"{opts}: predicted {expected}, generated {got} [{status}]")
        if got != expected:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
