#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "admix/align.hpp"
#include "admix/corpus.hpp"

namespace admix {

struct TokenPosterior {
  int instance = 0;            // corpus token index
  Eigen::VectorXd probs;       // simplex over T components
};

struct TypeAverageRow {
  std::string etymon, sound, reflex;
  int count = 0;               // instances of this type
  Eigen::VectorXd probs;       // mean token posterior
};

struct LanguageProfile {
  std::string language;
  int tokens = 0;
  Eigen::VectorXd theta;       // consensus theta row
  Eigen::VectorXd empirical;   // mean of this language's token posteriors; empty if no tokens
  bool argmax_agrees = true;   // flag when the two disagree (only when both exist)
};

/// P(z_i = t | theta, phi, x_i, y_i): normalized elementwise product of the
/// language's theta row and the phi column at (x, y).
/// Throws DegenerateMass when the unnormalized mass is below 1e-300.
Eigen::VectorXd token_component_posterior(const ConsensusEstimate& consensus,
                                          const Token& token);

std::vector<TokenPosterior> all_token_posteriors(const ConsensusEstimate& consensus,
                                                 const Corpus& corpus);

/// Unweighted mean of token posteriors per (etymon, sound, reflex), sorted.
std::vector<TypeAverageRow> type_average(const std::vector<TokenPosterior>& posteriors,
                                         const Corpus& corpus);

std::vector<LanguageProfile> language_profiles(
    const ConsensusEstimate& consensus, const std::vector<TokenPosterior>& posteriors,
    const Corpus& corpus);

// --- report emission (full precision machine output) ---

std::string render_language_profiles_tsv(const std::vector<LanguageProfile>& profiles,
                                         int T);
std::string render_type_posteriors_tsv(const std::vector<TypeAverageRow>& rows, int T);
std::string render_token_posteriors_tsv(const std::vector<TokenPosterior>& posteriors,
                                        const Corpus& corpus, int T);
std::string render_profiles_plotdata_json(const std::vector<LanguageProfile>& profiles,
                                          const ConsensusEstimate& consensus);

/// Rounded 2-decimal table for terminals; components whose overall usage is
/// below `usage_threshold` are suppressed.
std::string render_type_posteriors_pretty(const std::vector<TypeAverageRow>& rows,
                                          const ConsensusEstimate& consensus,
                                          double usage_threshold = 0.005);

}  // namespace admix
