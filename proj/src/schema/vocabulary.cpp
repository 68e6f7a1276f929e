#include "dc/schema/vocabulary.hpp"

#include <string_view>

#include "dc/error.hpp"
#include "dc/ingest/dcnf.hpp"

namespace dc::schema {
namespace detail {
extern const std::string_view kCoreVocabularyText;
}

namespace {

const ingest::ParsedNodeFile& parsed_core() {
  static const ingest::ParsedNodeFile parsed = [] {
    auto p = ingest::parse_node_file(detail::kCoreVocabularyText);
    if (!p.errors.empty() || p.provenances.size() != 1) {
      throw Error(ErrorCode::kConfig, "bundled core vocabulary failed to parse");
    }
    return p;
  }();
  return parsed;
}

}  // namespace

const std::vector<kg::Triple>& load_core_vocabulary() { return parsed_core().triples; }

const kg::Provenance& core_vocabulary_provenance() { return parsed_core().provenances.front(); }

std::size_t ensure_core_vocabulary(kg::Store& store) {
  store.register_provenance(core_vocabulary_provenance());
  return store.insert_triples(load_core_vocabulary());
}

}  // namespace dc::schema
