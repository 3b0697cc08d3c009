#include "edurank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <limits>

#include <json.hpp>

namespace edurank {

using nlohmann::json;

std::vector<std::string> WhitespaceTokenizer::tokenize(const std::string& text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

int SegmentedSet::total_edus() const {
  int n = 0;
  for (const auto& doc_spans : spans) n += static_cast<int>(doc_spans.size());
  return n;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

bool is_sentence_final(const std::string& tok) {
  return tok == "." || tok == "!" || tok == "?";
}

bool is_clause_separator(const std::string& tok) { return tok == "," || tok == ";"; }

std::string join_tokens(const std::vector<std::string>& tokens, int start, int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += tokens[static_cast<std::size_t>(i)];
  }
  return out;
}

void validate_spans(const Document& doc, const std::vector<std::pair<int, int>>& spans) {
  if (spans.empty()) throw ValidationError("segmenter returned no spans for doc " + doc.id);
  int expect = 0;
  for (const auto& [start, end] : spans) {
    if (start != expect || end <= start)
      throw ValidationError("segmenter spans for doc " + doc.id +
                            " are not sorted, non-overlapping and covering");
    expect = end;
  }
  if (expect != static_cast<int>(doc.tokens.size()))
    throw ValidationError("segmenter spans for doc " + doc.id + " do not cover all tokens");
}

}  // namespace

std::vector<EduSpan> fallback_segment(const Document& doc) {
  if (doc.tokens.empty()) throw ValidationError("cannot segment empty document " + doc.id);
  constexpr int kMinLen = 3;

  std::vector<std::pair<int, int>> fragments;
  int start = 0;
  const int n = static_cast<int>(doc.tokens.size());
  for (int i = 0; i < n; ++i) {
    const std::string& tok = doc.tokens[static_cast<std::size_t>(i)];
    if (is_sentence_final(tok) || is_clause_separator(tok)) {
      fragments.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  if (start < n) fragments.emplace_back(start, n);

  // Merge short fragments into the left neighbour; a short head fragment is
  // folded into the one after it.
  std::vector<std::pair<int, int>> merged;
  for (const auto& frag : fragments) {
    if (!merged.empty() && frag.second - frag.first < kMinLen) {
      merged.back().second = frag.second;
    } else if (!merged.empty() && merged.back().second - merged.back().first < kMinLen) {
      merged.back().second = frag.second;
    } else {
      merged.push_back(frag);
    }
  }

  std::vector<EduSpan> out;
  out.reserve(merged.size());
  for (int j = 0; j < static_cast<int>(merged.size()); ++j) {
    EduSpan span;
    span.edu_index = j;
    span.start = merged[static_cast<std::size_t>(j)].first;
    span.end = merged[static_cast<std::size_t>(j)].second;
    span.text = join_tokens(doc.tokens, span.start, span.end);
    out.push_back(std::move(span));
  }
  return out;
}

std::vector<std::pair<int, int>> FallbackSegmenter::segment(const Document& doc) const {
  std::vector<std::pair<int, int>> out;
  for (const EduSpan& span : fallback_segment(doc)) out.emplace_back(span.start, span.end);
  return out;
}

std::vector<EduSpan> segment_edus(const Document& doc, int doc_index,
                                  const SegmenterBackend& segmenter) {
  if (doc.tokens.empty()) throw ValidationError("cannot segment empty document " + doc.id);
  std::vector<std::pair<int, int>> raw;
  try {
    raw = segmenter.segment(doc);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SegmentationError("segmenter '" + segmenter.id() + "' failed on doc " + doc.id + ": " +
                            e.what());
  }
  validate_spans(doc, raw);

  std::vector<EduSpan> out;
  out.reserve(raw.size());
  for (int j = 0; j < static_cast<int>(raw.size()); ++j) {
    EduSpan span;
    span.doc_index = doc_index;
    span.edu_index = j;
    span.start = raw[static_cast<std::size_t>(j)].first;
    span.end = raw[static_cast<std::size_t>(j)].second;
    span.text = join_tokens(doc.tokens, span.start, span.end);
    out.push_back(std::move(span));
  }
  return out;
}

std::vector<std::pair<int, int>> snap_char_spans_to_tokens(
    const std::string& raw_text, const std::vector<std::string>& tokens,
    const std::vector<std::pair<int, int>>& char_spans) {
  // Character offset of each token start/end in raw_text, scanning once.
  std::vector<std::pair<int, int>> token_bounds;
  token_bounds.reserve(tokens.size());
  std::size_t pos = 0;
  for (const std::string& tok : tokens) {
    pos = raw_text.find(tok, pos);
    if (pos == std::string::npos)
      throw ValidationError("tokens do not align with raw text when snapping spans");
    token_bounds.emplace_back(static_cast<int>(pos), static_cast<int>(pos + tok.size()));
    pos += tok.size();
  }

  const int n = static_cast<int>(tokens.size());
  auto snap_start = [&](int ch) {
    int best_t = 0, best_d = std::numeric_limits<int>::max();
    for (int t = 0; t < n; ++t) {
      int d = std::abs(token_bounds[static_cast<std::size_t>(t)].first - ch);
      if (d < best_d) {
        best_d = d;
        best_t = t;
      }
    }
    return best_t;
  };
  auto snap_end = [&](int ch) {
    int best_t = 1, best_d = std::numeric_limits<int>::max();
    for (int t = 0; t < n; ++t) {
      int d = std::abs(token_bounds[static_cast<std::size_t>(t)].second - ch);
      if (d < best_d) {
        best_d = d;
        best_t = t + 1;
      }
    }
    return best_t;
  };

  std::vector<std::pair<int, int>> out;
  out.reserve(char_spans.size());
  for (const auto& [cs, ce] : char_spans) {
    int ts = snap_start(cs);
    int te = snap_end(ce);
    if (te <= ts) te = ts + 1;
    out.emplace_back(ts, te);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chunking

std::vector<Chunk> chunk_document(const Document& doc, int doc_index, int chunk_size) {
  if (chunk_size < 1) throw ConfigError("chunk size must be >= 1");
  std::vector<Chunk> out;
  const int n = static_cast<int>(doc.tokens.size());
  int idx = 0;
  for (int start = 0; start < n; start += chunk_size) {
    Chunk c;
    c.doc_index = doc_index;
    c.chunk_index = idx++;
    c.start = start;
    c.end = std::min(n, start + chunk_size);
    out.push_back(c);
  }
  return out;
}

SegmentedSet segment_set(DocumentSet set, const SegmenterBackend& segmenter, int chunk_size) {
  SegmentedSet out;
  out.base = std::move(set);
  out.spans.reserve(out.base.documents.size());
  out.chunks.reserve(out.base.documents.size());
  for (int i = 0; i < out.base.size(); ++i) {
    const Document& doc = out.base.documents[static_cast<std::size_t>(i)];
    out.spans.push_back(segment_edus(doc, i, segmenter));
    out.chunks.push_back(chunk_document(doc, i, chunk_size));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files

CorpusReader::CorpusReader(const std::filesystem::path& path, const Tokenizer& tokenizer)
    : in_(path), tokenizer_(tokenizer) {
  if (!in_.is_open()) throw FormatError("cannot open corpus file " + path.string());
}

std::optional<DocumentSet> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
      throw RecordError("malformed corpus line", line_);
    if (!rec.contains("docs"))
      throw FormatError("corpus line " + std::to_string(line_) + " is missing the 'docs' field");
    if (!rec["docs"].is_array())
      throw FormatError("corpus line " + std::to_string(line_) + " has a non-array 'docs' field");
    if (rec["docs"].empty()) throw RecordError("record has an empty 'docs' array", line_);

    DocumentSet set;
    set.set_id = rec.contains("id") && rec["id"].is_string()
                     ? rec["id"].get<std::string>()
                     : "set-" + std::to_string(line_ - 1);
    int doc_idx = 0;
    for (const auto& d : rec["docs"]) {
      if (!d.is_string()) throw RecordError("non-string entry in 'docs'", line_);
      set.documents.emplace_back(set.set_id + "/doc-" + std::to_string(doc_idx++),
                                 d.get<std::string>(), tokenizer_);
    }
    if (rec.contains("summary") && rec["summary"].is_string())
      set.reference_summary = rec["summary"].get<std::string>();
    return set;
  }
  return std::nullopt;
}

std::vector<DocumentSet> load_corpus(const std::filesystem::path& path, const Tokenizer& tokenizer,
                                     std::vector<std::string>* errors) {
  CorpusReader reader(path, tokenizer);
  std::vector<DocumentSet> out;
  while (true) {
    try {
      auto set = reader.next();
      if (!set) break;
      out.push_back(std::move(*set));
    } catch (const RecordError& e) {
      if (errors) errors->push_back(e.what());
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<DocumentSet>& sets) {
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write corpus " + path.string());
  for (const DocumentSet& set : sets) {
    json rec;
    rec["id"] = set.set_id;
    json docs = json::array();
    for (const Document& doc : set.documents) docs.push_back(doc.raw_text);
    rec["docs"] = std::move(docs);
    if (set.reference_summary) rec["summary"] = *set.reference_summary;
    out << rec.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Segmented cache

void write_segmented_cache(const std::filesystem::path& path,
                           const std::vector<SegmentedSet>& sets,
                           const std::string& tokenizer_id) {
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write segmented cache " + path.string());
  for (const SegmentedSet& set : sets) {
    json rec;
    rec["id"] = set.base.set_id;
    json docs = json::array();
    for (const Document& doc : set.base.documents) docs.push_back(doc.raw_text);
    rec["docs"] = std::move(docs);
    if (set.base.reference_summary) rec["summary"] = *set.base.reference_summary;
    json spans = json::array();
    for (const auto& doc_spans : set.spans) {
      json doc_arr = json::array();
      for (const EduSpan& s : doc_spans) doc_arr.push_back(json::array({s.start, s.end}));
      spans.push_back(std::move(doc_arr));
    }
    rec["edu_spans"] = std::move(spans);
    rec["tokenizer_id"] = tokenizer_id;
    out << rec.dump() << '\n';
  }
}

std::vector<SegmentedSet> read_segmented_cache(const std::filesystem::path& path,
                                               const Tokenizer& tokenizer, int chunk_size) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open segmented cache " + path.string());
  std::vector<SegmentedSet> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw FormatError("malformed cache line " + std::to_string(line_no));
    if (rec.value("tokenizer_id", std::string()) != tokenizer.id())
      throw FormatError("segmented cache was written with tokenizer '" +
                        rec.value("tokenizer_id", std::string()) + "', expected '" +
                        tokenizer.id() + "'");

    SegmentedSet set;
    set.base.set_id = rec.value("id", "set-" + std::to_string(line_no - 1));
    for (std::size_t i = 0; i < rec["docs"].size(); ++i) {
      set.base.documents.emplace_back(set.base.set_id + "/doc-" + std::to_string(i),
                                      rec["docs"][i].get<std::string>(), tokenizer);
    }
    if (rec.contains("summary")) set.base.reference_summary = rec["summary"].get<std::string>();

    const auto& spans = rec["edu_spans"];
    if (spans.size() != set.base.documents.size())
      throw FormatError("cache line " + std::to_string(line_no) + ": edu_spans/docs mismatch");
    for (int d = 0; d < set.base.size(); ++d) {
      const Document& doc = set.base.documents[static_cast<std::size_t>(d)];
      std::vector<EduSpan> doc_spans;
      int j = 0;
      for (const auto& pair : spans[static_cast<std::size_t>(d)]) {
        EduSpan s;
        s.doc_index = d;
        s.edu_index = j++;
        s.start = pair[0].get<int>();
        s.end = pair[1].get<int>();
        s.text = join_tokens(doc.tokens, s.start, s.end);
        doc_spans.push_back(std::move(s));
      }
      // Re-validate: the cache may come from an older run.
      std::vector<std::pair<int, int>> raw;
      for (const EduSpan& s : doc_spans) raw.emplace_back(s.start, s.end);
      validate_spans(doc, raw);
      set.spans.push_back(std::move(doc_spans));
      set.chunks.push_back(chunk_document(doc, d, chunk_size));
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace edurank
