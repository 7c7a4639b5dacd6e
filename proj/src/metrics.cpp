#include "dimkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimkit {

namespace {

bool accepted(const std::vector<double>& sims, double delta) {
    if (sims.empty()) {
        throw std::invalid_argument("morph row needs at least one contributing subject");
    }
    double lowest = sims.front();
    for (double s : sims) {
        lowest = std::min(lowest, s);
    }
    return lowest > delta;
}

}  // namespace

double mmpmr(const SimilarityTable& table, double delta) {
    if (table.rows.empty()) {
        throw std::invalid_argument("mmpmr needs a nonempty similarity table");
    }
    std::size_t hits = 0;
    for (const auto& row : table.rows) {
        if (accepted(row, delta)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(table.rows.size());
}

std::vector<double> map_1c(const std::vector<SimilarityTable>& tables,
                           const std::vector<double>& deltas) {
    if (tables.empty() || tables.size() != deltas.size()) {
        throw std::invalid_argument("map_1c needs one threshold per table");
    }
    const std::size_t morphs = tables.front().rows.size();
    if (morphs == 0) {
        throw std::invalid_argument("map_1c needs nonempty tables");
    }
    for (const auto& t : tables) {
        if (t.rows.size() != morphs) {
            throw std::invalid_argument("map_1c tables are misaligned");
        }
    }
    const std::size_t systems = tables.size();
    std::vector<std::size_t> fooled_at_least(systems + 1, 0);
    for (std::size_t m = 0; m < morphs; ++m) {
        std::size_t fooled = 0;
        for (std::size_t s = 0; s < systems; ++s) {
            if (accepted(tables[s].rows[m], deltas[s])) {
                ++fooled;
            }
        }
        for (std::size_t c = 1; c <= fooled; ++c) {
            ++fooled_at_least[c];
        }
    }
    std::vector<double> out(systems);
    for (std::size_t c = 1; c <= systems; ++c) {
        out[c - 1] = static_cast<double>(fooled_at_least[c]) / static_cast<double>(morphs);
    }
    return out;
}

double threshold_at_fmr(std::vector<double> impostor_scores, double fmr) {
    if (impostor_scores.empty()) {
        throw std::invalid_argument("threshold_at_fmr needs impostor scores");
    }
    if (!(fmr > 0.0 && fmr < 1.0)) {
        throw std::invalid_argument("fmr must lie in (0, 1)");
    }
    std::sort(impostor_scores.begin(), impostor_scores.end());
    const auto n = impostor_scores.size();
    // Candidates are the sample values; scores strictly above the largest
    // always number zero, so a valid candidate exists.
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && impostor_scores[i] == impostor_scores[i - 1]) {
            continue;
        }
        const double candidate = impostor_scores[i];
        const auto above = static_cast<std::size_t>(
            impostor_scores.end() -
            std::upper_bound(impostor_scores.begin(), impostor_scores.end(), candidate));
        if (static_cast<double>(above) / static_cast<double>(n) <= fmr) {
            return candidate;
        }
    }
    return impostor_scores.back();
}

double transferability(const std::vector<bool>& fa_on_alpha,
                       const std::vector<bool>& fa_on_beta) {
    if (fa_on_alpha.size() != fa_on_beta.size() || fa_on_alpha.empty()) {
        throw std::invalid_argument("decision vectors must be nonempty and equal length");
    }
    std::size_t detected_alpha = 0;
    std::size_t detected_both = 0;
    for (std::size_t i = 0; i < fa_on_alpha.size(); ++i) {
        if (fa_on_alpha[i]) {
            ++detected_alpha;
            if (fa_on_beta[i]) {
                ++detected_both;
            }
        }
    }
    if (detected_alpha == 0) {
        throw std::domain_error("transferability undefined: conditioning event is empty");
    }
    return static_cast<double>(detected_both) / static_cast<double>(detected_alpha);
}

double rsm(double t_ab, double t_ba) {
    if (!(t_ab > 0.0) || !(t_ba > 0.0)) {
        throw std::domain_error("rsm undefined for non-positive transferability");
    }
    return std::log(t_ab / t_ba);
}

}  // namespace dimkit
