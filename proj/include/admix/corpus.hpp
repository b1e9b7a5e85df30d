#pragma once

#include <optional>
#include <string>
#include <vector>

namespace admix {

/// One observed reflex of one proto-sound slot in one etymon in one language.
/// Raw parse-time record; the indexed form lives in Corpus::tokens.
struct SoundChangeInstance {
  std::string language;
  std::string etymon;
  std::string sound;
  std::string reflex;
  std::string gloss;  // optional column, may be empty
};

/// Index of environments s = (etymon, sound) and their outcome alphabets.
/// All orderings are lexicographic, so ids are invariant under input row
/// permutation and identical across reruns.
struct EnvironmentTable {
  struct Environment {
    std::string etymon;
    std::string sound;
    std::vector<std::string> outcomes;  // sorted, ids contiguous from 0
  };

  std::vector<std::string> languages;    // sorted
  std::vector<Environment> environments; // sorted by (etymon, sound)

  int num_languages() const { return static_cast<int>(languages.size()); }
  int num_environments() const { return static_cast<int>(environments.size()); }

  /// -1 if absent
  int language_id(const std::string& name) const;
  int environment_id(const std::string& etymon, const std::string& sound) const;
  int outcome_id(int env, const std::string& reflex) const;
};

/// Instance resolved to integer ids against an EnvironmentTable.
struct Token {
  int language;     // l_i
  int environment;  // x_i
  int outcome;      // y_i
  bool operator==(const Token&) const = default;
};

struct Corpus {
  EnvironmentTable table;
  std::vector<Token> tokens;          // input row order
  std::vector<std::string> glosses;   // parallel to tokens; empty if no gloss column
  bool has_gloss = false;

  int size() const { return static_cast<int>(tokens.size()); }
  /// |{(x_i, y_i)}|
  int num_types() const;
  /// tokens per language; sums to size()
  std::vector<int> language_counts() const;
};

struct ParseOptions {
  /// default: repeated identical rows are distinct attestations
  bool drop_duplicate_rows = false;
};

/// Parse the canonical TSV format: UTF-8, '\t' delimiter, '\n' line ends,
/// header `language etymon sound reflex` plus optional `gloss`, '#' comments.
/// Throws MissingColumn / EmptyField / NonUtf8Input with the offending row.
Corpus parse_dataset(const std::string& path, const ParseOptions& options = {});

/// Parse from an in-memory buffer (same contract as parse_dataset).
Corpus parse_dataset_text(const std::string& text, const ParseOptions& options = {});

/// Canonical TSV emission; parse(serialize(c)) == c and the bytes are stable.
std::string serialize_corpus(const Corpus& corpus);

/// Homophonous reconstructions (same (etymon, sound) key, different glosses)
/// already share one environment key; this reports the collisions.
struct HomophoneCollision {
  std::string etymon;
  std::string sound;
  std::vector<std::string> glosses;  // distinct, sorted
};

struct MergedCorpus {
  Corpus corpus;  // identical to the input corpus
  std::vector<HomophoneCollision> collisions;
};

MergedCorpus merge_homophones(const Corpus& corpus);

struct ValidationReport {
  struct LanguageCount {
    std::string language;
    int count;
  };
  std::vector<LanguageCount> language_counts;       // sorted by language
  std::vector<std::string> uninformative_environments;  // "etymon/sound", single outcome
  std::vector<std::string> sparse_languages;        // below min_language_count
  bool clean() const {
    return uninformative_environments.empty() && sparse_languages.empty();
  }
};

ValidationReport validate(const Corpus& corpus, int min_language_count = 1);

}  // namespace admix
