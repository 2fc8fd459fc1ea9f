#include "rencontre/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "rencontre/kernels/rng.hpp"

namespace rencontre::kernels {
namespace {

// ---------------------------------------------------------------------------
// Vector exp/log, double precision, Cephes rational approximations (~1 ulp).
// Inputs here are always finite; exp saturates to 0 outside the representable
// range, log assumes positive normal arguments.
// ---------------------------------------------------------------------------

inline __m256d mm256_ldexp_pd(__m256d x, __m256i n) {
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(n, bias), 52);
    return _mm256_mul_pd(x, _mm256_castsi256_pd(pow2));
}

// AVX2 has no pd->epi64 conversion; values here are small integers.
inline __m256i cvtpd_epi64_small(__m256d v) {
    const __m128i lo = _mm256_cvtpd_epi32(v);
    return _mm256_cvtepi32_epi64(lo);
}

inline __m256d vec_exp_pd(__m256d x) {
    const __m256d exp_hi = _mm256_set1_pd(709.437);
    const __m256d exp_lo = _mm256_set1_pd(-708.396418532264106224);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

    const __m256d clamped = _mm256_min_pd(_mm256_max_pd(x, exp_lo), exp_hi);
    const __m256d n_real = _mm256_round_pd(_mm256_mul_pd(clamped, log2e),
                                           _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n_real, c1, clamped);
    r = _mm256_fnmadd_pd(n_real, c2, r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d px = _mm256_fmadd_pd(p0, rr, p1);
    px = _mm256_fmadd_pd(px, rr, p2);
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
    qx = _mm256_fmadd_pd(qx, rr, q2);
    qx = _mm256_fmadd_pd(qx, rr, q3);

    // exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2))
    const __m256d ratio = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    __m256d result = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ratio, _mm256_set1_pd(1.0));
    result = mm256_ldexp_pd(result, cvtpd_epi64_small(n_real));
    const __m256d under = _mm256_cmp_pd(x, exp_lo, _CMP_LT_OQ);
    return _mm256_andnot_pd(under, result);
}

// log via 2 atanh((m-1)/(m+1)) with m reduced to [sqrt(1/2), sqrt(2)):
// |t| <= 0.1716, and the odd series truncated at t^19 is below 1 ulp.
inline __m256d vec_log_pd(__m256d x) {
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
    const __m256i half_exp = _mm256_set1_epi64x(0x3FE0000000000000ll);

    const __m256i bits = _mm256_castpd_si256(x);
    __m256i e_i = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1022));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_exp)); // in [0.5, 1)

    // if m < sqrt(1/2): e -= 1, m *= 2
    const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
    e_i = _mm256_add_epi64(e_i, _mm256_castpd_si256(small)); // lanes of small are -1
    m = _mm256_add_pd(m, _mm256_and_pd(small, m));

    const __m128i e32 = _mm256_castsi256_si128(
        _mm256_permutevar8x32_epi32(e_i, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0)));
    const __m256d e = _mm256_cvtepi32_pd(e32);

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z = _mm256_mul_pd(t, t);

    __m256d w = _mm256_set1_pd(1.0 / 19);
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 17));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 15));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 13));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 11));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 9));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 7));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 5));
    w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 3));
    // 2 atanh t = 2t + 2t z w
    const __m256d t2 = _mm256_add_pd(t, t);
    __m256d frac = _mm256_fmadd_pd(_mm256_mul_pd(t2, z), w, t2);

    // ln2 = hi - lo exactly at this split
    frac = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), frac);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), frac);
}

inline double hsum_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

double logsumexp_avx2(const double* x, std::size_t len) {
    if (len == 0)
        return -std::numeric_limits<double>::infinity();
    const std::size_t blocked = (len / 4) * 4;
    double m = x[0];
    if (blocked >= 4) {
        __m256d vmax = _mm256_loadu_pd(x);
        for (std::size_t i = 4; i < blocked; i += 4)
            vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(x + i));
        m = hmax_pd(vmax);
    }
    for (std::size_t i = blocked; i < len; ++i)
        m = x[i] > m ? x[i] : m;

    const __m256d vm = _mm256_set1_pd(m);
    __m256d vacc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < blocked; i += 4)
        vacc = _mm256_add_pd(vacc, vec_exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vm)));
    double acc = hsum_pd(vacc);
    for (std::size_t i = blocked; i < len; ++i)
        acc += std::exp(x[i] - m);
    return m + std::log(acc);
}

void log_binom_row_avx2(long n, int d, double log_odds, const double* lf,
                        long k_begin, std::size_t len, double* out) {
    const __m256d lfn = _mm256_set1_pd(lf[n]);
    const __m256d vd = _mm256_set1_pd(static_cast<double>(d));
    const __m256d vlo = _mm256_set1_pd(log_odds);
    std::size_t i = 0;
    // A vector block covers k..k+3 and reads lf[n-k-3..n-k], so it needs k <= n-3.
    for (; i + 4 <= len && k_begin + static_cast<long>(i) <= n - 3; i += 4) {
        const long k = k_begin + static_cast<long>(i);
        const __m256d lfk = _mm256_loadu_pd(lf + k);
        const __m256d lfnk_rev = _mm256_loadu_pd(lf + (n - k - 3));
        const __m256d lfnk = _mm256_permute4x64_pd(lfnk_rev, _MM_SHUFFLE(0, 1, 2, 3));
        const __m256d kk = _mm256_setr_pd(static_cast<double>(k), static_cast<double>(k + 1),
                                          static_cast<double>(k + 2), static_cast<double>(k + 3));
        const __m256d logc = _mm256_sub_pd(_mm256_sub_pd(lfn, lfk), lfnk);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vd, logc, _mm256_mul_pd(kk, vlo)));
    }
    for (; i < len; ++i) {
        const long k = k_begin + static_cast<long>(i);
        out[i] = d * (lf[n] - lf[k] - lf[n - k]) + static_cast<double>(k) * log_odds;
    }
}

double power_weight_sum_avx2(double s, double log_y, std::uint64_t n_begin,
                             std::uint64_t n_end) {
    const __m256d vs = _mm256_set1_pd(-s);
    const __m256d vly = _mm256_set1_pd(log_y);
    double acc = 0.0, comp = 0.0; // Kahan over 4-lane block sums
    std::uint64_t n = n_begin;
    for (; n + 4 <= n_end; n += 4) {
        const __m256d vn = _mm256_setr_pd(static_cast<double>(n), static_cast<double>(n + 1),
                                          static_cast<double>(n + 2), static_cast<double>(n + 3));
        const __m256d ex = _mm256_fmadd_pd(vs, vec_log_pd(vn), _mm256_mul_pd(vn, vly));
        const double t = hsum_pd(vec_exp_pd(ex));
        const double y = t - comp;
        const double a = acc + y;
        comp = (a - acc) - y;
        acc = a;
    }
    for (; n < n_end; ++n) {
        const double t =
            std::exp(-s * std::log(static_cast<double>(n)) + static_cast<double>(n) * log_y);
        const double y = t - comp;
        const double a = acc + y;
        comp = (a - acc) - y;
        acc = a;
    }
    return acc;
}

double dot_reverse_avx2(const double* a, const double* b, std::size_t len) {
    __m256d vacc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb_rev = _mm256_loadu_pd(b + (len - 4 - i));
        const __m256d vb = _mm256_permute4x64_pd(vb_rev, _MM_SHUFFLE(0, 1, 2, 3));
        vacc = _mm256_fmadd_pd(va, vb, vacc);
    }
    double acc = hsum_pd(vacc);
    for (; i < len; ++i)
        acc += a[i] * b[len - 1 - i];
    return acc;
}

// ---------------------------------------------------------------------------
// Monte-Carlo batch: four replications per vector, lanes refilled as they
// finish so throughput stays near 4x. Integer-only, so histograms are
// bit-identical to the scalar kernel (same per-replication streams).
// ---------------------------------------------------------------------------

constexpr int kMaxVecWalks = 17; // above this fall back to scalar

struct LaneState {
    alignas(32) std::uint64_t s[4][4]; // xoshiro words x lanes
    alignas(32) std::int64_t diff[kMaxVecWalks - 1][4];
    long step[4];
    bool active[4];
};

inline __m256i rotl_vec(__m256i x, int k) {
    return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
}

inline __m256i cmplt_u64(__m256i a, __m256i b) {
    const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
    return _mm256_cmpgt_epi64(_mm256_xor_si256(b, sign), _mm256_xor_si256(a, sign));
}

void mc_batch_avx2(const McTask& task, std::uint64_t* hist, std::uint64_t* censored) {
    const int d = task.d;
    if (d > kMaxVecWalks || task.rep_end - task.rep_begin < 8) {
        scalar_kernels().mc_batch(task, hist, censored);
        return;
    }

    LaneState ls{};
    std::uint64_t next_rep = task.rep_begin;
    int live = 0;

    auto load_lane = [&](int lane) {
        if (next_rep >= task.rep_end)
            return;
        Xoshiro256pp rng(task.seed, next_rep++);
        for (int w = 0; w < 4; ++w)
            ls.s[w][lane] = rng.s[w];
        for (int j = 0; j < d - 1; ++j)
            ls.diff[j][lane] = 0;
        ls.step[lane] = 0;
        ls.active[lane] = true;
        ++live;
    };

    for (int lane = 0; lane < 4; ++lane)
        load_lane(lane);

    __m256i vs0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[0]));
    __m256i vs1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[1]));
    __m256i vs2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[2]));
    __m256i vs3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[3]));
    __m256i vdiff[kMaxVecWalks - 1];
    for (int j = 0; j < d - 1; ++j)
        vdiff[j] = _mm256_setzero_si256();

    __m256i thr[kMaxVecWalks];
    for (int j = 0; j < d; ++j)
        thr[j] = _mm256_set1_epi64x(static_cast<long long>(task.thresholds[j]));

    __m256i masks[kMaxVecWalks];
    while (live > 0) {
        for (int j = 0; j < d; ++j) {
            const __m256i out = _mm256_add_epi64(rotl_vec(_mm256_add_epi64(vs0, vs3), 23), vs0);
            const __m256i t = _mm256_slli_epi64(vs1, 17);
            vs2 = _mm256_xor_si256(vs2, vs0);
            vs3 = _mm256_xor_si256(vs3, vs1);
            vs1 = _mm256_xor_si256(vs1, vs2);
            vs0 = _mm256_xor_si256(vs0, vs3);
            vs2 = _mm256_xor_si256(vs2, t);
            vs3 = rotl_vec(vs3, 45);
            masks[j] = cmplt_u64(out, thr[j]);
        }
        const __m256i xd = masks[d - 1];
        __m256i any = _mm256_setzero_si256();
        for (int j = 0; j < d - 1; ++j) {
            vdiff[j] = _mm256_add_epi64(vdiff[j], _mm256_sub_epi64(xd, masks[j]));
            any = _mm256_or_si256(any, vdiff[j]);
        }
        const __m256i hit = _mm256_cmpeq_epi64(any, _mm256_setzero_si256());
        const int hit_mask = _mm256_movemask_pd(_mm256_castsi256_pd(hit));

        bool reload = false;
        for (int lane = 0; lane < 4; ++lane) {
            if (!ls.active[lane])
                continue;
            ++ls.step[lane];
            if (hit_mask & (1 << lane))
                ++hist[ls.step[lane]];
            else if (ls.step[lane] >= task.horizon)
                ++*censored;
            else
                continue;
            ls.active[lane] = false;
            --live;
            reload = true;
        }
        if (reload && next_rep < task.rep_end) {
            _mm256_store_si256(reinterpret_cast<__m256i*>(ls.s[0]), vs0);
            _mm256_store_si256(reinterpret_cast<__m256i*>(ls.s[1]), vs1);
            _mm256_store_si256(reinterpret_cast<__m256i*>(ls.s[2]), vs2);
            _mm256_store_si256(reinterpret_cast<__m256i*>(ls.s[3]), vs3);
            for (int j = 0; j < d - 1; ++j)
                _mm256_store_si256(reinterpret_cast<__m256i*>(ls.diff[j]), vdiff[j]);
            for (int lane = 0; lane < 4; ++lane)
                if (!ls.active[lane])
                    load_lane(lane);
            vs0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[0]));
            vs1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[1]));
            vs2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[2]));
            vs3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.s[3]));
            for (int j = 0; j < d - 1; ++j)
                vdiff[j] = _mm256_load_si256(reinterpret_cast<const __m256i*>(ls.diff[j]));
        }
    }
}

constexpr KernelSet kAvx2 = {
    "avx2",         logsumexp_avx2, log_binom_row_avx2,
    power_weight_sum_avx2, dot_reverse_avx2, mc_batch_avx2,
};

} // namespace

const KernelSet* avx2_kernels() {
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &kAvx2;
    return nullptr;
}

} // namespace rencontre::kernels

#else // non-x86 builds fall back to the scalar reference kernels

namespace rencontre::kernels {
const KernelSet* avx2_kernels() {
    return nullptr;
}
} // namespace rencontre::kernels

#endif
