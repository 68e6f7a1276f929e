#include "dc/resolver/resolver.hpp"

#include <algorithm>
#include <iterator>

#include "dc/error.hpp"
#include "dc/kg/terms.hpp"

namespace dc::resolver {
namespace {

bool is_name(const kg::Dcid& p) { return p.str() == terms::kName; }

bool equal_ascii_folded(std::string_view a, std::string_view b) {
  auto low = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [&](char x, char y) { return low(x) == low(y); });
}

std::vector<kg::Dcid> lookup(const kg::Dcid& predicate, const DescriptionValue& value,
                             const kg::Store& graph) {
  if (const auto* s = std::get_if<std::string>(&value)) {
    return graph.subjects_with_text_or_ref(predicate, *s, is_name(predicate));
  }
  return graph.subjects_with(predicate, std::get<kg::NodeValue>(value), is_name(predicate));
}

bool exact_name(const kg::Dcid& node, const DescriptionValue& value, const kg::Store& graph) {
  const kg::Dcid name(std::string(terms::kName));
  for (const kg::Triple& t : graph.neighbors(node, name, kg::Direction::kOut)) {
    const kg::Text* text = t.object.as_text();
    if (!text) continue;
    if (const auto* s = std::get_if<std::string>(&value); s && *s == text->value) return true;
    if (const auto* v = std::get_if<kg::NodeValue>(&value); v && *v == t.object) return true;
  }
  return false;
}

}  // namespace

ResolutionResult resolve(const Description& d, const kg::Store& graph) {
  if (d.constraints.empty()) {
    throw Error(ErrorCode::kInvalidDescription, "description has no constraints");
  }
  std::vector<kg::Dcid> candidates;
  bool first = true;
  for (const auto& [predicate, value] : d.constraints) {
    auto hits = lookup(predicate, value, graph);
    if (first) {
      candidates = std::move(hits);
      first = false;
    } else {
      std::vector<kg::Dcid> kept;
      std::set_intersection(candidates.begin(), candidates.end(), hits.begin(), hits.end(),
                            std::back_inserter(kept));
      candidates = std::move(kept);
    }
    if (candidates.empty()) break;
  }

  const auto name_it = std::find_if(d.constraints.begin(), d.constraints.end(),
                                    [](const auto& kv) { return is_name(kv.first); });
  ResolutionResult out;
  for (kg::Dcid& c : candidates) {
    double score = kExactScore;
    if (name_it != d.constraints.end() && !exact_name(c, name_it->second, graph)) {
      score = kCaseInsensitiveScore;
    }
    out.candidates.push_back({std::move(c), score});
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  return out;
}

std::vector<BatchEntry> resolve_batch(std::span<const Description> ds, const kg::Store& graph) {
  std::vector<BatchEntry> out;
  out.reserve(ds.size());
  for (const Description& d : ds) {
    try {
      out.push_back({resolve(d, graph)});
    } catch (const Error& e) {
      out.push_back({std::string(e.what())});
    }
  }
  return out;
}

bool matches(const kg::Dcid& node, const Description& d, const kg::Store& graph) {
  if (d.constraints.empty()) return false;
  for (const auto& [predicate, value] : d.constraints) {
    const auto triples = graph.neighbors(node, predicate, kg::Direction::kOut);
    const bool ok = std::any_of(triples.begin(), triples.end(), [&](const kg::Triple& t) {
      const kg::Text* text = t.object.as_text();
      if (const auto* v = std::get_if<kg::NodeValue>(&value)) {
        if (is_name(predicate) && text && v->as_text()) {
          return equal_ascii_folded(v->as_text()->value, text->value);
        }
        return *v == t.object;
      }
      const std::string& s = std::get<std::string>(value);
      if (const kg::Dcid* ref = t.object.as_ref()) return ref->str() == s;
      if (!text) return false;
      return is_name(predicate) ? equal_ascii_folded(s, text->value) : text->value == s;
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace dc::resolver
