"""
JIT-compiled single-flip Metropolis annealing over flattened polynomials.

The polynomial is passed as CSR-style arrays so that arbitrary-degree terms
are handled by the same loop:

- ``term_ptr`` / ``term_vars``: variables of term t are
  ``term_vars[term_ptr[t]:term_ptr[t + 1]]``
- ``var_ptr`` / ``var_terms``: terms containing variable i are
  ``var_terms[var_ptr[i]:var_ptr[i + 1]]``
"""

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


@njit(cache=True, nogil=True)
def _flip_delta(state, i, coef, term_ptr, term_vars, var_ptr, var_terms):
    gain = 0.0
    for p in range(var_ptr[i], var_ptr[i + 1]):
        t = var_terms[p]
        active = True
        for q in range(term_ptr[t], term_ptr[t + 1]):
            v = term_vars[q]
            if v != i and state[v] == 0:
                active = False
                break
        if active:
            gain += coef[t]
    if state[i] == 0:
        return gain
    return -gain


@njit(cache=True, nogil=True)
def anneal_reads(states, uniforms, betas, coef, term_ptr, term_vars, var_ptr, var_terms):
    """
    Anneal every row of ``states`` in place.

    ``uniforms[r, s, i]`` is the acceptance draw for read r, sweep s,
    variable i; ``betas[s]`` the inverse temperature of sweep s.
    """
    reads, num_vars = states.shape
    sweeps = betas.shape[0]
    for r in range(reads):
        state = states[r]
        for s in range(sweeps):
            beta = betas[s]
            for i in range(num_vars):
                delta = _flip_delta(state, i, coef, term_ptr, term_vars, var_ptr, var_terms)
                if delta <= 0.0 or uniforms[r, s, i] < np.exp(-beta * delta):
                    state[i] = 1 - state[i]
    return states
