import itertools
from pathlib import Path

from modulant import expr as E

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def same_function(f, expected, labels, q=2):
    """Exhaustive comparison of a local function with an expression."""
    for values in itertools.product(range(q), repeat=len(labels)):
        env = dict(zip(labels, values))
        if f.evaluate(env, q) != E.evaluate(expected, env, q):
            return False
    return True


def truth_sat(f, variables):
    """Satisfiability by the recursive evaluator over all valuations."""
    return any(E.evaluate(f, dict(zip(variables, row)))
               for row in itertools.product((0, 1), repeat=len(variables)))


def _mobius(n):
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def mobius_bound(q, k, c):
    """Number of aperiodic words of length ``c`` over ``q**k`` letters."""
    return sum(_mobius(d) * q ** (k * c // d) for d in range(1, c + 1) if c % d == 0)
