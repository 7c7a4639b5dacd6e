#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dimkit {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);

// y += a * x
void axpy(double a, const Vec& x, Vec& y);

bool all_finite(const Vec& a);

Vec zeros(std::size_t n);
Vec gaussian_vec(std::mt19937_64& rng, std::size_t n);

// Stable per-item seed derivation (splitmix64 over seed ^ f(index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace dimkit
