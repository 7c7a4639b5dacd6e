#pragma once

#include <vector>

namespace dimkit {

// Similarity scores for one verifier: rows[m][n] is the similarity of morph
// m to its n-th contributing subject (higher = more alike).
struct SimilarityTable {
    std::vector<std::vector<double>> rows;
};

// Fraction of morphs whose minimum similarity over contributing subjects
// strictly exceeds the verification threshold.
double mmpmr(const SimilarityTable& table, double delta);

// Entry c (1-based) is the fraction of morphs accepted (min-rule, strict >)
// by at least c of the verifiers. Tables must be row-aligned.
std::vector<double> map_1c(const std::vector<SimilarityTable>& tables,
                           const std::vector<double>& deltas);

// Smallest threshold whose empirical false-match rate (fraction of impostor
// scores strictly above it) does not exceed fmr; ties resolve upward.
double threshold_at_fmr(std::vector<double> impostor_scores, double fmr);

// T(alpha, beta) = P(f_alpha(X_beta) = 1 | f_alpha(X_alpha) = 1), with the
// decision vectors aligned by morph pair.
double transferability(const std::vector<bool>& fa_on_alpha,
                       const std::vector<bool>& fa_on_beta);

// Relative strength: log(T(alpha, beta) / T(beta, alpha)).
double rsm(double t_ab, double t_ba);

}  // namespace dimkit
