# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled twins of the loops in ``_pykernels``; outputs must match bit for bit."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

cnp.import_array()

ctypedef int64_t idx_t


def brandes(const idx_t[::1] indptr, const idx_t[::1] indices, const idx_t[::1] sources, weights=None):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    if weights is None:
        weights = np.ones(sources.shape[0], dtype=np.float64)
    cdef const double[::1] wts = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] dep_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[int64_t, ndim=1] dsum_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int32_t, ndim=1] ecc_arr = np.zeros(n, dtype=np.int32)
    cdef double[::1] dependency = dep_arr
    cdef int64_t[::1] dist_sum = dsum_arr
    cdef int32_t[::1] ecc = ecc_arr
    cdef vector[idx_t] dist = vector[idx_t](n, -1)
    cdef vector[double] sigma = vector[double](n, 0.0)
    cdef vector[double] delta = vector[double](n, 0.0)
    cdef vector[idx_t] order
    cdef Py_ssize_t si, head, j, pos
    cdef idx_t s, v, w, dv, dw
    cdef int64_t total
    cdef double sv, coeff, ws
    order.reserve(n)
    with nogil:
        for si in range(sources.shape[0]):
            s = sources[si]
            ws = wts[si]
            order.clear()
            order.push_back(s)
            dist[s] = 0
            sigma[s] = 1.0
            head = 0
            total = 0
            while head < <Py_ssize_t>order.size():
                v = order[head]
                head += 1
                dv = dist[v]
                total += dv
                sv = sigma[v]
                for j in range(indptr[v], indptr[v + 1]):
                    w = indices[j]
                    if dist[w] < 0:
                        dist[w] = dv + 1
                        order.push_back(w)
                    if dist[w] == dv + 1:
                        sigma[w] += sv
            dist_sum[s] = total
            ecc[s] = <int32_t>dist[order[order.size() - 1]]
            for pos in range(<Py_ssize_t>order.size() - 1, -1, -1):
                w = order[pos]
                dw = dist[w]
                coeff = (1.0 + delta[w]) / sigma[w]
                for j in range(indptr[w], indptr[w + 1]):
                    v = indices[j]
                    if dist[v] == dw - 1:
                        delta[v] += sigma[v] * coeff
                if w != s:
                    dependency[w] += ws * delta[w]
            for pos in range(<Py_ssize_t>order.size()):
                w = order[pos]
                dist[w] = -1
                sigma[w] = 0.0
                delta[w] = 0.0
    return dep_arr, dsum_arr, ecc_arr


def distance_stats(const idx_t[::1] indptr, const idx_t[::1] indices, const idx_t[::1] sources):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] dsum_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int32_t, ndim=1] ecc_arr = np.zeros(n, dtype=np.int32)
    cdef int64_t[::1] dist_sum = dsum_arr
    cdef int32_t[::1] ecc = ecc_arr
    cdef vector[idx_t] dist = vector[idx_t](n, -1)
    cdef vector[idx_t] order
    cdef Py_ssize_t si, head, j, pos
    cdef idx_t s, v, w, dv, last
    cdef int64_t total
    order.reserve(n)
    with nogil:
        for si in range(sources.shape[0]):
            s = sources[si]
            order.clear()
            order.push_back(s)
            dist[s] = 0
            head = 0
            total = 0
            last = 0
            while head < <Py_ssize_t>order.size():
                v = order[head]
                head += 1
                dv = dist[v]
                total += dv
                last = dv
                for j in range(indptr[v], indptr[v + 1]):
                    w = indices[j]
                    if dist[w] < 0:
                        dist[w] = dv + 1
                        order.push_back(w)
            dist_sum[s] = total
            ecc[s] = <int32_t>last
            for pos in range(<Py_ssize_t>order.size()):
                dist[order[pos]] = -1
    return dsum_arr, ecc_arr


def local_clustering(const idx_t[::1] indptr, const idx_t[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef vector[char] mark = vector[char](n, 0)
    cdef Py_ssize_t v, j, jj
    cdef idx_t k, u
    cdef int64_t links
    with nogil:
        for v in range(n):
            k = indptr[v + 1] - indptr[v]
            if k < 2:
                continue
            for j in range(indptr[v], indptr[v + 1]):
                mark[indices[j]] = 1
            links = 0
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                for jj in range(indptr[u], indptr[u + 1]):
                    if mark[indices[jj]]:
                        links += 1
            for j in range(indptr[v], indptr[v + 1]):
                mark[indices[j]] = 0
            out[v] = <double>links / <double>(k * (k - 1))
    return out_arr


def rewire_swaps(src, dst, int64_t n_companies, picks_a, picks_b,
                 int64_t target, int64_t max_fail, int64_t fails):
    cdef int64_t[::1] s_arr = np.ascontiguousarray(src, dtype=np.int64)
    cdef int64_t[::1] d_arr = np.ascontiguousarray(dst, dtype=np.int64)
    cdef int64_t[::1] pa = np.ascontiguousarray(picks_a, dtype=np.int64)
    cdef int64_t[::1] pb = np.ascontiguousarray(picks_b, dtype=np.int64)
    cdef unordered_set[int64_t] present
    cdef Py_ssize_t m = s_arr.shape[0]
    cdef Py_ssize_t n_picks = pa.shape[0]
    cdef Py_ssize_t e, i = 0
    cdef int64_t done = 0
    cdef int64_t a, b, s1, c1, s2, c2, k1, k2
    present.reserve(2 * m)
    with nogil:
        for e in range(m):
            present.insert(s_arr[e] * n_companies + d_arr[e])
        while done < target and i < n_picks:
            if fails >= max_fail:
                break
            a = pa[i]
            b = pb[i]
            i += 1
            s1 = s_arr[a]
            c1 = d_arr[a]
            s2 = s_arr[b]
            c2 = d_arr[b]
            if s1 == s2 or c1 == c2:
                fails += 1
                continue
            k1 = s1 * n_companies + c2
            k2 = s2 * n_companies + c1
            if present.count(k1) or present.count(k2):
                fails += 1
                continue
            present.erase(s1 * n_companies + c1)
            present.erase(s2 * n_companies + c2)
            present.insert(k1)
            present.insert(k2)
            d_arr[a] = c2
            d_arr[b] = c1
            done += 1
            fails = 0
    dst[:] = np.asarray(d_arr)
    return done, i, fails


cdef inline idx_t _find(vector[idx_t]& parent, idx_t x) noexcept nogil:
    cdef idx_t root = x
    cdef idx_t nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def percolation_counts(const idx_t[::1] indptr, const idx_t[::1] indices, keep, const idx_t[::1] order):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef const cnp.uint8_t[::1] keep_v = np.ascontiguousarray(keep, dtype=np.uint8)
    cdef vector[char] present = vector[char](n, 0)
    cdef vector[idx_t] parent = vector[idx_t](n, 0)
    cdef Py_ssize_t r_total = order.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] counts_arr = np.zeros(r_total + 1, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t v, j, r
    cdef idx_t u, ru, rv, node
    cdef int64_t comps = 0
    with nogil:
        for v in range(n):
            parent[v] = v
            present[v] = keep_v[v]
        for v in range(n):
            if not present[v]:
                continue
            comps += 1
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                if u < v and present[u]:
                    ru = _find(parent, u)
                    rv = _find(parent, v)
                    if ru != rv:
                        parent[ru] = rv
                        comps -= 1
        counts[r_total] = comps
        for r in range(r_total - 1, -1, -1):
            node = order[r]
            present[node] = 1
            comps += 1
            for j in range(indptr[node], indptr[node + 1]):
                u = indices[j]
                if present[u]:
                    ru = _find(parent, u)
                    rv = _find(parent, node)
                    if ru != rv:
                        parent[ru] = rv
                        comps -= 1
            counts[r] = comps
    return counts_arr
