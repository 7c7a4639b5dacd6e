#include "dimkit/vec.hpp"

#include <cmath>
#include <stdexcept>

namespace dimkit {

namespace {

void check_same_size(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("vector dimension mismatch");
    }
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(const Vec& a) {
    return std::sqrt(dot(a, a));
}

double dist(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

Vec add(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Vec sub(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

Vec scaled(const Vec& a, double s) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] * s;
    }
    return out;
}

void axpy(double a, const Vec& x, Vec& y) {
    check_same_size(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += a * x[i];
    }
}

bool all_finite(const Vec& a) {
    for (double v : a) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Vec zeros(std::size_t n) {
    return Vec(n, 0.0);
}

Vec gaussian_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = gauss(rng);
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace dimkit
