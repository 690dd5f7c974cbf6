#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polymean {

inline constexpr double kPi = 3.14159265358979323846;

/// Error categories map onto distinct CLI exit codes.
enum class ErrorKind { invalid_argument, geometry, dimension_mismatch, io, malformed_manifest, out_of_range };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D>
constexpr Vec<D> operator+(const Vec<D>& a, const Vec<D>& b) {
    Vec<D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t D>
constexpr Vec<D> operator-(const Vec<D>& a, const Vec<D>& b) {
    Vec<D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t D>
constexpr Vec<D> operator*(double s, const Vec<D>& a) {
    Vec<D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = s * a[i];
    return r;
}

template <std::size_t D>
constexpr double dot(const Vec<D>& a, const Vec<D>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t D>
inline double norm(const Vec<D>& a) {
    return std::sqrt(dot(a, a));
}

template <std::size_t D>
inline Vec<D> normalized(const Vec<D>& a) {
    return (1.0 / norm(a)) * a;
}

inline Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Row-major D x D matrix, used for the linear part of isometries.
template <std::size_t D>
using Mat = std::array<double, D * D>;

template <std::size_t D>
constexpr Mat<D> identity_matrix() {
    Mat<D> m{};
    for (std::size_t i = 0; i < D; ++i) m[i * D + i] = 1.0;
    return m;
}

template <std::size_t D>
constexpr Vec<D> apply(const Mat<D>& m, const Vec<D>& x) {
    Vec<D> r{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) r[i] += m[i * D + j] * x[j];
    return r;
}

template <std::size_t D>
constexpr Mat<D> matmul(const Mat<D>& a, const Mat<D>& b) {
    Mat<D> r{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t k = 0; k < D; ++k)
            for (std::size_t j = 0; j < D; ++j) r[i * D + j] += a[i * D + k] * b[k * D + j];
    return r;
}

/// Worker count: explicit value if positive, else POLYMEAN_THREADS, else hardware concurrency.
inline unsigned resolve_threads(int requested = 0) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("POLYMEAN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Work items are independent; each output element is owned by one
/// item so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(threads);
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) fn(i);
            } catch (...) {
                failures[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

}  // namespace polymean
