"""Re-derive the 3x3 counterexample for A B A^2 B^2 from scratch and print the evidence."""
import json

import numpy as np

from gwords.certify import check_certificate, sturm_decide
from gwords.constructions import HIJO_WORD, hijo_example
from gwords.linalg_core import RationalMatrix, is_positive_definite_exact
from gwords.words import canonicalize, evaluate


def main():
    A, B = hijo_example()
    seq = canonicalize(HIJO_WORD)
    for name, M in (("A", A), ("B", B)):
        minors = [RationalMatrix(tuple(r[:k] for r in M.rows[:k])).det() for k in (1, 2, 3)]
        print(f"{name} leading minors {[str(x) for x in minors]}, "
              f"positive definite (exact): {is_positive_definite_exact(M)}")
    cert = sturm_decide(seq, A, B)
    spec = evaluate(seq, A.to_float(), B.to_float()).spectrum
    print(f"word: {HIJO_WORD}")
    print(f"certificate: {cert.kind}, value {cert.value}")
    print(f"independent sympy check: {check_certificate(cert.to_dict())}")
    print("numeric spectrum:", np.array2string(spec.as_array(), precision=6))
    print(json.dumps(cert.to_dict()["word_product"], indent=1))


if __name__ == "__main__":
    main()
