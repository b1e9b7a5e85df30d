#include "admix/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "admix/errors.hpp"

namespace admix {

namespace {

const char* kColumns[4] = {"language", "etymon", "sound", "reflex"};

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool valid_utf8(const std::string& s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    int extra;
    if (c < 0x80) extra = 0;
    else if ((c >> 5) == 0x6) extra = 1;
    else if ((c >> 4) == 0xe) extra = 2;
    else if ((c >> 3) == 0x1e) extra = 3;
    else return false;
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += extra + 1;
  }
  return true;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

int EnvironmentTable::language_id(const std::string& name) const {
  auto it = std::lower_bound(languages.begin(), languages.end(), name);
  if (it == languages.end() || *it != name) return -1;
  return static_cast<int>(it - languages.begin());
}

int EnvironmentTable::environment_id(const std::string& etymon,
                                     const std::string& sound) const {
  auto key = std::pair<const std::string&, const std::string&>(etymon, sound);
  auto it = std::lower_bound(
      environments.begin(), environments.end(), key,
      [](const Environment& e, const auto& k) {
        return std::tie(e.etymon, e.sound) < std::tie(k.first, k.second);
      });
  if (it == environments.end() || it->etymon != etymon || it->sound != sound)
    return -1;
  return static_cast<int>(it - environments.begin());
}

int EnvironmentTable::outcome_id(int env, const std::string& reflex) const {
  const auto& out = environments[env].outcomes;
  auto it = std::lower_bound(out.begin(), out.end(), reflex);
  if (it == out.end() || *it != reflex) return -1;
  return static_cast<int>(it - out.begin());
}

int Corpus::num_types() const {
  std::set<std::pair<int, int>> types;
  for (const auto& t : tokens) types.emplace(t.environment, t.outcome);
  return static_cast<int>(types.size());
}

std::vector<int> Corpus::language_counts() const {
  std::vector<int> counts(table.num_languages(), 0);
  for (const auto& t : tokens) counts[t.language]++;
  return counts;
}

Corpus parse_dataset_text(const std::string& text, const ParseOptions& options) {
  // collect raw rows
  std::vector<SoundChangeInstance> rows;
  bool has_gloss = false;
  bool header_seen = false;
  int ncols = 4;

  int lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string line = (nl == std::string::npos) ? text.substr(start)
                                                 : text.substr(start, nl - start);
    start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!valid_utf8(line)) throw NonUtf8Input(lineno);

    auto fields = split_tabs(line);
    if (!header_seen) {
      for (int c = 0; c < 4; ++c) {
        if (static_cast<int>(fields.size()) <= c || trim(fields[c]) != kColumns[c])
          throw MissingColumn(kColumns[c], lineno);
      }
      if (fields.size() == 5 && trim(fields[4]) == "gloss") {
        has_gloss = true;
        ncols = 5;
      } else if (fields.size() > 4) {
        throw MissingColumn("gloss", lineno);
      }
      header_seen = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != ncols) {
      // a row missing (or exceeding) declared columns
      int c = std::min<int>(static_cast<int>(fields.size()), ncols - 1);
      throw MissingColumn(c < 4 ? kColumns[c] : "gloss", lineno);
    }
    SoundChangeInstance inst;
    inst.language = trim(fields[0]);
    inst.etymon = trim(fields[1]);
    inst.sound = trim(fields[2]);
    inst.reflex = trim(fields[3]);
    if (has_gloss) inst.gloss = trim(fields[4]);
    const std::string* vals[4] = {&inst.language, &inst.etymon, &inst.sound,
                                  &inst.reflex};
    for (int c = 0; c < 4; ++c)
      if (vals[c]->empty()) throw EmptyField(kColumns[c], lineno);
    rows.push_back(std::move(inst));
  }
  if (!header_seen) throw MissingColumn(kColumns[0], lineno);

  if (options.drop_duplicate_rows) {
    std::set<std::array<std::string, 5>> seen;
    std::vector<SoundChangeInstance> kept;
    for (auto& r : rows) {
      std::array<std::string, 5> key{r.language, r.etymon, r.sound, r.reflex,
                                     r.gloss};
      if (seen.insert(key).second) kept.push_back(std::move(r));
    }
    rows = std::move(kept);
  }

  // deterministic lexicographic indexing
  Corpus corpus;
  corpus.has_gloss = has_gloss;
  std::set<std::string> langs;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> envs;
  for (const auto& r : rows) {
    langs.insert(r.language);
    envs[{r.etymon, r.sound}].insert(r.reflex);
  }
  corpus.table.languages.assign(langs.begin(), langs.end());
  for (auto& [key, outs] : envs) {
    EnvironmentTable::Environment e;
    e.etymon = key.first;
    e.sound = key.second;
    e.outcomes.assign(outs.begin(), outs.end());
    corpus.table.environments.push_back(std::move(e));
  }

  corpus.tokens.reserve(rows.size());
  for (const auto& r : rows) {
    Token t;
    t.language = corpus.table.language_id(r.language);
    t.environment = corpus.table.environment_id(r.etymon, r.sound);
    t.outcome = corpus.table.outcome_id(t.environment, r.reflex);
    corpus.tokens.push_back(t);
    if (has_gloss) corpus.glosses.push_back(r.gloss);
  }
  return corpus;
}

Corpus parse_dataset(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_text(ss.str(), options);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out = "language\tetymon\tsound\treflex";
  if (corpus.has_gloss) out += "\tgloss";
  out += '\n';
  for (size_t i = 0; i < corpus.tokens.size(); ++i) {
    const Token& t = corpus.tokens[i];
    const auto& env = corpus.table.environments[t.environment];
    out += corpus.table.languages[t.language];
    out += '\t';
    out += env.etymon;
    out += '\t';
    out += env.sound;
    out += '\t';
    out += env.outcomes[t.outcome];
    if (corpus.has_gloss) {
      out += '\t';
      out += corpus.glosses[i];
    }
    out += '\n';
  }
  return out;
}

MergedCorpus merge_homophones(const Corpus& corpus) {
  MergedCorpus result;
  result.corpus = corpus;
  if (!corpus.has_gloss) return result;
  // identical (etymon, sound) keys already share an environment id; report
  // keys whose rows carry more than one distinct non-empty gloss
  std::map<int, std::set<std::string>> by_env;
  for (size_t i = 0; i < corpus.tokens.size(); ++i) {
    if (!corpus.glosses[i].empty())
      by_env[corpus.tokens[i].environment].insert(corpus.glosses[i]);
  }
  for (const auto& [env, glosses] : by_env) {
    if (glosses.size() < 2) continue;
    HomophoneCollision c;
    c.etymon = corpus.table.environments[env].etymon;
    c.sound = corpus.table.environments[env].sound;
    c.glosses.assign(glosses.begin(), glosses.end());
    result.collisions.push_back(std::move(c));
  }
  return result;
}

ValidationReport validate(const Corpus& corpus, int min_language_count) {
  ValidationReport report;
  auto counts = corpus.language_counts();
  for (int l = 0; l < corpus.table.num_languages(); ++l) {
    report.language_counts.push_back({corpus.table.languages[l], counts[l]});
    if (counts[l] < min_language_count)
      report.sparse_languages.push_back(corpus.table.languages[l]);
  }
  for (const auto& env : corpus.table.environments) {
    if (env.outcomes.size() == 1)
      report.uninformative_environments.push_back(env.etymon + "/" + env.sound);
  }
  return report;
}

}  // namespace admix
