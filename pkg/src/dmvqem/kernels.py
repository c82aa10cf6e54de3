"""Hot dense-linear-algebra kernels: gate application and depolarizing noise.

Every kernel mutates a C-contiguous complex128 array in place. Qubit 0 is the
most significant bit of the computational-basis index, so qubit q on an
n-qubit register has bit stride 1 << (n - 1 - q). Two-qubit gate matrices are
4x4 in the basis (b_first, b_second) with the first listed qubit as the more
significant pair bit.

Each kernel has a numba @njit implementation and a pure-numpy implementation
with identical semantics; _backend decides which is bound to the public
names. Kernels stay single-threaded so results are bit-reproducible.

The depolarizing channel uses the closed form of the uniform non-identity
Pauli mixture on the gate support:
    1 qubit:  rho -> (1 - 4p/3) rho + (4p/3) (I/2 (x) Tr_q rho)
    2 qubits: rho -> (1 - 16p/15) rho + (16p/15) (I/4 (x) Tr_q1q2 rho)
which follows from averaging P rho P over all Paulis on the support.
"""

import numpy as np

from ._backend import HAS_NUMBA, njit

# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


@njit(cache=True)
def _left_mul_1q_nb(mat, u, q, n):
    dim = 1 << n
    s = 1 << (n - 1 - q)
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    for base in range(dim):
        if base & s:
            continue
        i1 = base | s
        for col in range(dim):
            a = mat[base, col]
            b = mat[i1, col]
            mat[base, col] = u00 * a + u01 * b
            mat[i1, col] = u10 * a + u11 * b


@njit(cache=True)
def _right_mul_dag_1q_nb(mat, u, q, n):
    dim = 1 << n
    s = 1 << (n - 1 - q)
    c00 = np.conj(u[0, 0])
    c01 = np.conj(u[0, 1])
    c10 = np.conj(u[1, 0])
    c11 = np.conj(u[1, 1])
    for row in range(dim):
        for base in range(dim):
            if base & s:
                continue
            j1 = base | s
            a = mat[row, base]
            b = mat[row, j1]
            mat[row, base] = a * c00 + b * c01
            mat[row, j1] = a * c10 + b * c11


@njit(cache=True)
def _left_mul_2q_nb(mat, u, q1, q2, n):
    dim = 1 << n
    s1 = 1 << (n - 1 - q1)
    s2 = 1 << (n - 1 - q2)
    for base in range(dim):
        if (base & s1) or (base & s2):
            continue
        i0 = base
        i1 = base | s2
        i2 = base | s1
        i3 = base | s1 | s2
        for col in range(dim):
            a0 = mat[i0, col]
            a1 = mat[i1, col]
            a2 = mat[i2, col]
            a3 = mat[i3, col]
            mat[i0, col] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
            mat[i1, col] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
            mat[i2, col] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
            mat[i3, col] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3


@njit(cache=True)
def _right_mul_dag_2q_nb(mat, u, q1, q2, n):
    dim = 1 << n
    s1 = 1 << (n - 1 - q1)
    s2 = 1 << (n - 1 - q2)
    uc = np.conj(u)
    for row in range(dim):
        for base in range(dim):
            if (base & s1) or (base & s2):
                continue
            j0 = base
            j1 = base | s2
            j2 = base | s1
            j3 = base | s1 | s2
            a0 = mat[row, j0]
            a1 = mat[row, j1]
            a2 = mat[row, j2]
            a3 = mat[row, j3]
            mat[row, j0] = a0 * uc[0, 0] + a1 * uc[0, 1] + a2 * uc[0, 2] + a3 * uc[0, 3]
            mat[row, j1] = a0 * uc[1, 0] + a1 * uc[1, 1] + a2 * uc[1, 2] + a3 * uc[1, 3]
            mat[row, j2] = a0 * uc[2, 0] + a1 * uc[2, 1] + a2 * uc[2, 2] + a3 * uc[2, 3]
            mat[row, j3] = a0 * uc[3, 0] + a1 * uc[3, 1] + a2 * uc[3, 2] + a3 * uc[3, 3]


@njit(cache=True)
def _depolarize_1q_nb(mat, q, n, p):
    dim = 1 << n
    s = 1 << (n - 1 - q)
    alpha = 1.0 - 4.0 * p / 3.0
    beta = 4.0 * p / 3.0
    for rb in range(dim):
        if rb & s:
            continue
        r1 = rb | s
        for cb in range(dim):
            if cb & s:
                continue
            c1 = cb | s
            t = 0.5 * (mat[rb, cb] + mat[r1, c1])
            mat[rb, cb] = alpha * mat[rb, cb] + beta * t
            mat[r1, c1] = alpha * mat[r1, c1] + beta * t
            mat[rb, c1] = alpha * mat[rb, c1]
            mat[r1, cb] = alpha * mat[r1, cb]


@njit(cache=True)
def _depolarize_2q_nb(mat, q1, q2, n, p):
    dim = 1 << n
    s1 = 1 << (n - 1 - q1)
    s2 = 1 << (n - 1 - q2)
    alpha = 1.0 - 16.0 * p / 15.0
    beta = 16.0 * p / 15.0
    for rb in range(dim):
        if (rb & s1) or (rb & s2):
            continue
        r0 = rb
        r1 = rb | s2
        r2 = rb | s1
        r3 = rb | s1 | s2
        for cb in range(dim):
            if (cb & s1) or (cb & s2):
                continue
            c0 = cb
            c1 = cb | s2
            c2 = cb | s1
            c3 = cb | s1 | s2
            t = 0.25 * (mat[r0, c0] + mat[r1, c1] + mat[r2, c2] + mat[r3, c3])
            mat[r0, c0] = alpha * mat[r0, c0] + beta * t
            mat[r1, c1] = alpha * mat[r1, c1] + beta * t
            mat[r2, c2] = alpha * mat[r2, c2] + beta * t
            mat[r3, c3] = alpha * mat[r3, c3] + beta * t
            mat[r0, c1] = alpha * mat[r0, c1]
            mat[r0, c2] = alpha * mat[r0, c2]
            mat[r0, c3] = alpha * mat[r0, c3]
            mat[r1, c0] = alpha * mat[r1, c0]
            mat[r1, c2] = alpha * mat[r1, c2]
            mat[r1, c3] = alpha * mat[r1, c3]
            mat[r2, c0] = alpha * mat[r2, c0]
            mat[r2, c1] = alpha * mat[r2, c1]
            mat[r2, c3] = alpha * mat[r2, c3]
            mat[r3, c0] = alpha * mat[r3, c0]
            mat[r3, c1] = alpha * mat[r3, c1]
            mat[r3, c2] = alpha * mat[r3, c2]


@njit(cache=True)
def _apply_vec_1q_nb(vec, u, q, n):
    dim = 1 << n
    s = 1 << (n - 1 - q)
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    for base in range(dim):
        if base & s:
            continue
        i1 = base | s
        a = vec[base]
        b = vec[i1]
        vec[base] = u00 * a + u01 * b
        vec[i1] = u10 * a + u11 * b


@njit(cache=True)
def _apply_vec_2q_nb(vec, u, q1, q2, n):
    dim = 1 << n
    s1 = 1 << (n - 1 - q1)
    s2 = 1 << (n - 1 - q2)
    for base in range(dim):
        if (base & s1) or (base & s2):
            continue
        i0 = base
        i1 = base | s2
        i2 = base | s1
        i3 = base | s1 | s2
        a0 = vec[i0]
        a1 = vec[i1]
        a2 = vec[i2]
        a3 = vec[i3]
        vec[i0] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
        vec[i1] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
        vec[i2] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
        vec[i3] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _left_mul_1q_np(mat, u, q, n):
    dim = 1 << n
    view = mat.reshape(1 << q, 2, 1 << (n - 1 - q), dim)
    view[...] = np.einsum("ab,xbyc->xayc", u, view)


def _right_mul_dag_1q_np(mat, u, q, n):
    dim = 1 << n
    view = mat.reshape(dim, 1 << q, 2, 1 << (n - 1 - q))
    view[...] = np.einsum("ab,rxbz->rxaz", u.conj(), view)


def _left_mul_2q_np(mat, u, q1, q2, n):
    dim = 1 << n
    u4 = np.ascontiguousarray(u).reshape(2, 2, 2, 2)
    t = np.moveaxis(mat.reshape((2,) * n + (dim,)), (q1, q2), (0, 1))
    t[...] = np.einsum("abcd,cd...->ab...", u4, t)


def _right_mul_dag_2q_np(mat, u, q1, q2, n):
    dim = 1 << n
    uc4 = u.conj().reshape(2, 2, 2, 2)
    t = np.moveaxis(mat.reshape((dim,) + (2,) * n), (1 + q1, 1 + q2), (1, 2))
    t[...] = np.einsum("abcd,rcd...->rab...", uc4, t)


def _depolarize_1q_np(mat, q, n, p):
    alpha = 1.0 - 4.0 * p / 3.0
    beta = 4.0 * p / 3.0
    hi, lo = 1 << q, 1 << (n - 1 - q)
    view = mat.reshape(hi, 2, lo, hi, 2, lo)
    tr = view[:, 0, :, :, 0, :] + view[:, 1, :, :, 1, :]
    mat *= alpha
    view[:, 0, :, :, 0, :] += 0.5 * beta * tr
    view[:, 1, :, :, 1, :] += 0.5 * beta * tr


def _depolarize_2q_np(mat, q1, q2, n, p):
    alpha = 1.0 - 16.0 * p / 15.0
    beta = 16.0 * p / 15.0
    t = np.moveaxis(
        mat.reshape((2,) * (2 * n)), (q1, q2, n + q1, n + q2), (0, 1, 2, 3)
    )
    tr = t[0, 0, 0, 0] + t[0, 1, 0, 1] + t[1, 0, 1, 0] + t[1, 1, 1, 1]
    mat *= alpha
    for a in range(2):
        for b in range(2):
            t[a, b, a, b] += 0.25 * beta * tr


def _apply_vec_1q_np(vec, u, q, n):
    view = vec.reshape(1 << q, 2, 1 << (n - 1 - q))
    view[...] = np.einsum("ab,xby->xay", u, view)


def _apply_vec_2q_np(vec, u, q1, q2, n):
    u4 = np.ascontiguousarray(u).reshape(2, 2, 2, 2)
    t = np.moveaxis(vec.reshape((2,) * n), (q1, q2), (0, 1))
    t[...] = np.einsum("abcd,cd...->ab...", u4, t)


# ---------------------------------------------------------------------------
# backend dispatch
# ---------------------------------------------------------------------------

if HAS_NUMBA:
    left_mul_1q = _left_mul_1q_nb
    right_mul_dag_1q = _right_mul_dag_1q_nb
    left_mul_2q = _left_mul_2q_nb
    right_mul_dag_2q = _right_mul_dag_2q_nb
    depolarize_1q = _depolarize_1q_nb
    depolarize_2q = _depolarize_2q_nb
    apply_vec_1q = _apply_vec_1q_nb
    apply_vec_2q = _apply_vec_2q_nb
else:
    left_mul_1q = _left_mul_1q_np
    right_mul_dag_1q = _right_mul_dag_1q_np
    left_mul_2q = _left_mul_2q_np
    right_mul_dag_2q = _right_mul_dag_2q_np
    depolarize_1q = _depolarize_1q_np
    depolarize_2q = _depolarize_2q_np
    apply_vec_1q = _apply_vec_1q_np
    apply_vec_2q = _apply_vec_2q_np
