#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edurank/errors.hpp"

namespace edurank {

/// Splits on ASCII whitespace. EDU offsets, chunk boundaries and budgets are
/// all expressed in this token space so that they line up with the rows the
/// token encoder produces.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(const std::string& text) const = 0;
  virtual std::string id() const = 0;
};

class WhitespaceTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(const std::string& text) const override;
  std::string id() const override { return "whitespace-v1"; }
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;

  Document() = default;
  Document(std::string doc_id, std::string text, const Tokenizer& tokenizer)
      : id(std::move(doc_id)), raw_text(std::move(text)), tokens(tokenizer.tokenize(raw_text)) {}
};

struct DocumentSet {
  std::string set_id;
  std::vector<Document> documents;
  std::optional<std::string> reference_summary;

  int size() const { return static_cast<int>(documents.size()); }
};

/// Half-open token span [start, end) of one EDU. Spans of a document are
/// sorted, non-overlapping, and jointly cover every token.
struct EduSpan {
  int doc_index = 0;
  int edu_index = 0;
  int start = 0;
  int end = 0;
  std::string text;

  int length() const { return end - start; }
};

struct Chunk {
  int doc_index = 0;
  int chunk_index = 0;
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
};

struct SegmentedSet {
  DocumentSet base;
  std::vector<std::vector<EduSpan>> spans;   // per document
  std::vector<std::vector<Chunk>> chunks;    // per document

  int total_edus() const;
};

/// Flat EDU identifier used by labels, query sets and plans.
struct EduId {
  int doc = 0;
  int edu = 0;
  friend bool operator==(const EduId&, const EduId&) = default;
  friend auto operator<=>(const EduId&, const EduId&) = default;
};

// ---------------------------------------------------------------------------
// Segmentation

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  /// Token spans [start, end) covering the document, in order.
  virtual std::vector<std::pair<int, int>> segment(const Document& doc) const = 0;
  virtual std::string id() const = 0;
};

/// Deterministic segmenter used when no discourse parser is attached:
/// splits after sentence-final punctuation and clause separators, then
/// merges fragments shorter than 3 tokens into their left neighbour.
std::vector<EduSpan> fallback_segment(const Document& doc);

class FallbackSegmenter : public SegmenterBackend {
 public:
  std::vector<std::pair<int, int>> segment(const Document& doc) const override;
  std::string id() const override { return "fallback-v1"; }
};

/// Runs the backend and validates the result (coverage, ordering, overlap).
std::vector<EduSpan> segment_edus(const Document& doc, int doc_index,
                                  const SegmenterBackend& segmenter);

/// Maps character spans from an external parser onto token offsets, snapping
/// boundaries that fall inside a token to the nearest token edge.
std::vector<std::pair<int, int>> snap_char_spans_to_tokens(
    const std::string& raw_text, const std::vector<std::string>& tokens,
    const std::vector<std::pair<int, int>>& char_spans);

// ---------------------------------------------------------------------------
// Chunking

/// ceil(|tokens| / c) contiguous chunks; all but the last have size exactly c.
std::vector<Chunk> chunk_document(const Document& doc, int doc_index, int chunk_size);

/// Segments and chunks every document of the set.
SegmentedSet segment_set(DocumentSet set, const SegmenterBackend& segmenter, int chunk_size);

// ---------------------------------------------------------------------------
// Corpus files (JSON Lines: {"id": optional, "docs": [...], "summary": optional})

class CorpusReader {
 public:
  CorpusReader(const std::filesystem::path& path, const Tokenizer& tokenizer);

  /// Next record, or nullopt at end of file. Throws RecordError for lines
  /// that cannot be used (the reader stays usable and skips past them) and
  /// FormatError when the file violates the schema.
  std::optional<DocumentSet> next();

  long line_number() const { return line_; }

 private:
  std::ifstream in_;
  const Tokenizer& tokenizer_;
  long line_ = 0;
};

/// Reads a whole corpus, skipping bad records. Collected record errors are
/// appended to `errors` when given; fatal format errors still throw.
std::vector<DocumentSet> load_corpus(const std::filesystem::path& path,
                                     const Tokenizer& tokenizer,
                                     std::vector<std::string>* errors = nullptr);

void write_corpus(const std::filesystem::path& path, const std::vector<DocumentSet>& sets);

// ---------------------------------------------------------------------------
// Segmented cache (corpus + EDU spans + tokenizer id)

void write_segmented_cache(const std::filesystem::path& path,
                           const std::vector<SegmentedSet>& sets,
                           const std::string& tokenizer_id);

/// Reloads a cache written by write_segmented_cache. Throws FormatError when
/// the stored tokenizer id differs from `expected_tokenizer_id` (the cached
/// offsets would be meaningless in another token space).
std::vector<SegmentedSet> read_segmented_cache(const std::filesystem::path& path,
                                               const Tokenizer& tokenizer,
                                               int chunk_size);

}  // namespace edurank
