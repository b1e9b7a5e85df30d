#include "admix/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "admix/errors.hpp"
#include "json.hpp"

namespace admix {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Eigen::VectorXd token_component_posterior(const ConsensusEstimate& consensus,
                                          const Token& token) {
  const ModelDims& dims = consensus.dims;
  const int T = dims.T;
  Eigen::VectorXd p(T);
  for (int t = 0; t < T; ++t)
    p[t] = consensus.theta_map(token.language, t) *
           consensus.phi_map[dims.phi_index(t, token.environment) + token.outcome];
  double mass = p.sum();
  if (!(mass >= 1e-300))
    throw DegenerateMass("token posterior mass underflow (language " +
                         std::to_string(token.language) + ", environment " +
                         std::to_string(token.environment) + ")");
  return p / mass;
}

std::vector<TokenPosterior> all_token_posteriors(const ConsensusEstimate& consensus,
                                                 const Corpus& corpus) {
  std::vector<TokenPosterior> out;
  out.reserve(corpus.tokens.size());
  for (int i = 0; i < corpus.size(); ++i)
    out.push_back({i, token_component_posterior(consensus, corpus.tokens[i])});
  return out;
}

std::vector<TypeAverageRow> type_average(const std::vector<TokenPosterior>& posteriors,
                                         const Corpus& corpus) {
  if (posteriors.size() != corpus.tokens.size())
    throw DimensionMismatch("type_average: one posterior per instance required");
  // (environment, outcome) ids sort identically to (etymon, sound, reflex)
  std::map<std::pair<int, int>, TypeAverageRow> groups;
  for (const auto& tp : posteriors) {
    const Token& tok = corpus.tokens[tp.instance];
    auto key = std::make_pair(tok.environment, tok.outcome);
    auto it = groups.find(key);
    if (it == groups.end()) {
      TypeAverageRow row;
      const auto& env = corpus.table.environments[tok.environment];
      row.etymon = env.etymon;
      row.sound = env.sound;
      row.reflex = env.outcomes[tok.outcome];
      row.count = 1;
      row.probs = tp.probs;
      groups.emplace(key, std::move(row));
    } else {
      it->second.count += 1;
      it->second.probs += tp.probs;
    }
  }
  std::vector<TypeAverageRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, row] : groups) {
    row.probs /= static_cast<double>(row.count);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LanguageProfile> language_profiles(
    const ConsensusEstimate& consensus, const std::vector<TokenPosterior>& posteriors,
    const Corpus& corpus) {
  const int T = consensus.dims.T;
  const int L = corpus.table.num_languages();
  std::vector<LanguageProfile> profiles(L);
  for (int l = 0; l < L; ++l) {
    profiles[l].language = corpus.table.languages[l];
    profiles[l].theta = consensus.theta_map.row(l);
    profiles[l].empirical = Eigen::VectorXd::Zero(T);
  }
  for (const auto& tp : posteriors) {
    int l = corpus.tokens[tp.instance].language;
    profiles[l].empirical += tp.probs;
    profiles[l].tokens += 1;
  }
  for (auto& prof : profiles) {
    if (prof.tokens == 0) {
      prof.empirical.resize(0);  // omitted for empty languages
      continue;
    }
    prof.empirical /= static_cast<double>(prof.tokens);
    int at, ae;
    prof.theta.maxCoeff(&at);
    prof.empirical.maxCoeff(&ae);
    prof.argmax_agrees = (at == ae);
  }
  return profiles;
}

std::string render_language_profiles_tsv(const std::vector<LanguageProfile>& profiles,
                                         int T) {
  std::string out = "language\ttokens\targmax_theta\targmax_empirical\tagree";
  for (int t = 0; t < T; ++t) out += "\ttheta_" + std::to_string(t + 1);
  for (int t = 0; t < T; ++t) out += "\tempirical_" + std::to_string(t + 1);
  out += '\n';
  for (const auto& p : profiles) {
    int at = 0;
    p.theta.maxCoeff(&at);
    out += p.language + "\t" + std::to_string(p.tokens) + "\t" +
           std::to_string(at + 1) + "\t";
    if (p.empirical.size() > 0) {
      int ae = 0;
      p.empirical.maxCoeff(&ae);
      out += std::to_string(ae + 1);
      out += p.argmax_agrees ? "\tyes" : "\tno";
    } else {
      out += "-\t-";
    }
    for (int t = 0; t < T; ++t) out += "\t" + fmt_double(p.theta[t]);
    for (int t = 0; t < T; ++t)
      out += "\t" + (p.empirical.size() > 0 ? fmt_double(p.empirical[t])
                                            : std::string("-"));
    out += '\n';
  }
  return out;
}

std::string render_type_posteriors_tsv(const std::vector<TypeAverageRow>& rows, int T) {
  std::string out = "etymon\tsound\treflex\tcount";
  for (int t = 0; t < T; ++t) out += "\tp" + std::to_string(t + 1);
  out += '\n';
  for (const auto& r : rows) {
    out += r.etymon + "\t" + r.sound + "\t" + r.reflex + "\t" +
           std::to_string(r.count);
    for (int t = 0; t < T; ++t) out += "\t" + fmt_double(r.probs[t]);
    out += '\n';
  }
  return out;
}

std::string render_token_posteriors_tsv(const std::vector<TokenPosterior>& posteriors,
                                        const Corpus& corpus, int T) {
  std::string out = "index\tlanguage\tetymon\tsound\treflex";
  for (int t = 0; t < T; ++t) out += "\tp" + std::to_string(t + 1);
  out += '\n';
  for (const auto& tp : posteriors) {
    const Token& tok = corpus.tokens[tp.instance];
    const auto& env = corpus.table.environments[tok.environment];
    out += std::to_string(tp.instance) + "\t" +
           corpus.table.languages[tok.language] + "\t" + env.etymon + "\t" +
           env.sound + "\t" + env.outcomes[tok.outcome];
    for (int t = 0; t < T; ++t) out += "\t" + fmt_double(tp.probs[t]);
    out += '\n';
  }
  return out;
}

std::string render_profiles_plotdata_json(const std::vector<LanguageProfile>& profiles,
                                          const ConsensusEstimate& consensus) {
  nlohmann::json langs = nlohmann::json::array();
  for (const auto& p : profiles) {
    nlohmann::json j{{"language", p.language},
                     {"tokens", p.tokens},
                     {"theta", std::vector<double>(p.theta.begin(), p.theta.end())}};
    if (p.empirical.size() > 0)
      j["empirical"] = std::vector<double>(p.empirical.begin(), p.empirical.end());
    langs.push_back(std::move(j));
  }
  nlohmann::json j{
      {"components", consensus.dims.T},
      {"usage", std::vector<double>(consensus.usage.begin(), consensus.usage.end())},
      {"languages", langs}};
  return j.dump(2) + "\n";
}

std::string render_type_posteriors_pretty(const std::vector<TypeAverageRow>& rows,
                                          const ConsensusEstimate& consensus,
                                          double usage_threshold) {
  std::vector<int> keep;
  for (int t = 0; t < consensus.dims.T; ++t)
    if (consensus.usage[t] >= usage_threshold) keep.push_back(t);
  std::string out = "etymon | sound | reflex |";
  for (int t : keep) out += " k=" + std::to_string(t + 1);
  out += '\n';
  char buf[16];
  for (const auto& r : rows) {
    out += r.etymon + " | " + r.sound + " | " + r.reflex + " |";
    for (int t : keep) {
      std::snprintf(buf, sizeof(buf), " %.2f", r.probs[t]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace admix
