"""Exact p-adic isocrystals, filtrations and nilpotent orbits.

Thin convenience layer over the compiled extension: fixtures go in as JSON
documents (dicts or strings), results come back parsed.  Everything stays
exact; rationals are strings like "1/2" and p-adic scalars are digit
records.
"""

import json as _json
import os as _os
import sys as _sys

# Development builds park the extension next to the build tree; installed
# wheels have it inside the package.
_ext_dir = _os.environ.get("PHODGE_EXT_DIR")
if _ext_dir and _ext_dir not in _sys.path:
    _sys.path.insert(0, _ext_dir)

try:
    from . import _phodge as _core  # installed layout
except ImportError:  # pragma: no cover - dev layout
    import _phodge as _core

PhodgeError = _core.PhodgeError


def _doc(fixture):
    if isinstance(fixture, str):
        return fixture
    return _json.dumps(fixture)


def newton_polygon(fixture, name):
    """Slopes of the Newton polygon, non-increasing, as rational strings."""
    return _json.loads(_core.newton_polygon(_doc(fixture), name))


def slope_decomposition(fixture, name):
    return _json.loads(_core.slope_decomposition(_doc(fixture), name))


def simple_isocrystal(p, r, s):
    """Frobenius matrix of the simple object with slope r/s."""
    return _json.loads(_core.simple_isocrystal_frobenius(p, r, s))


def hn_filtration(fixture, filtration, isocrystal=""):
    return _json.loads(_core.hn_filtration(_doc(fixture), filtration, isocrystal))


def is_semistable(fixture, filtration, isocrystal=""):
    return _json.loads(_core.is_semistable(_doc(fixture), filtration, isocrystal))


def filtration_pairing(fixture, a, b):
    return _core.filtration_pairing(_doc(fixture), a, b)


def hm_invariant(fixture, filtration, subgroup):
    return _core.hm_invariant(_doc(fixture), filtration, subgroup)


def ps_limit(fixture, subgroup, filtration, to_zero=True):
    return _json.loads(_core.ps_limit(_doc(fixture), subgroup, filtration, to_zero))


def orbit_eval(fixture, nilpotent, filtration, t):
    return _json.loads(_core.orbit_eval(_doc(fixture), nilpotent, filtration, str(t)))


def orbit_limit(fixture, nilpotent, filtration, val_to_minus_infinity=True):
    return _json.loads(
        _core.orbit_limit(_doc(fixture), nilpotent, filtration, val_to_minus_infinity)
    )


def orbit_check(fixture, nilpotent, filtration, isocrystal=""):
    return _json.loads(_core.orbit_check(_doc(fixture), nilpotent, filtration, isocrystal))


def sl2_triple(fixture, nilpotent):
    return _json.loads(_core.sl2_triple(_doc(fixture), nilpotent))


def weight_filtration(fixture, nilpotent):
    return _json.loads(_core.weight_filtration(_doc(fixture), nilpotent))


def flag_distance(fixture, a, b):
    """"0", "1" or "p^-k"."""
    return _core.flag_distance(_doc(fixture), a, b)


def padic_exp(p, x, precision=64):
    return _core.padic_exp_str(p, str(x), precision)


def padic_log(p, x, precision=64):
    return _core.padic_log_str(p, str(x), precision)


def binomial_poly(n):
    return _core.binomial_poly_str(n)


def gauss_norm(p, coeffs, n, omega="0"):
    csv = ",".join(str(c) for c in coeffs)
    return _core.gauss_norm(p, csv, n, str(omega))


def mahler_expand(p, coeffs):
    csv = ",".join(str(c) for c in coeffs)
    return _json.loads(_core.mahler_expand(p, csv))


def eval_character(p, z, x, precision=64):
    return _json.loads(_core.eval_character(p, str(z), str(x), precision))


def newton_leq(lhs, rhs):
    return _core.newton_leq([str(s) for s in lhs], [str(s) for s in rhs])


def is_admissible_newton(slopes):
    return _core.is_admissible_newton([str(s) for s in slopes])


def siegel_stratum_dimension(slopes, g):
    return _core.siegel_stratum_dimension([str(s) for s in slopes], g)


def twisted_orbit_eval(fixture, nilpotent, model, z):
    return _json.loads(_core.twisted_orbit_eval(_doc(fixture), nilpotent, model, str(z)))


def distance_decay_report(fixture, nilpotent, model, sample_vals):
    return _json.loads(
        _core.distance_decay_report(_doc(fixture), nilpotent, model, list(sample_vals))
    )


def orbit_search(fixture, isocrystal, jumps, pool, budget=200000):
    return _json.loads(
        _core.orbit_search(
            _doc(fixture),
            isocrystal,
            [str(j) for j in jumps],
            [str(c) for c in pool],
            budget,
        )
    )


def verify(suite="all", seed=0):
    return _json.loads(_core.verify(suite, seed))


def estimate_report(p, l_max=12, n_max=8, omega=""):
    return _json.loads(_core.estimate_report(p, l_max, n_max, str(omega)))


def conjugation_limit(fixture, nilpotent, g_matrix):
    return _json.loads(
        _core.conjugation_limit(_doc(fixture), nilpotent, _json.dumps(g_matrix))
    )
