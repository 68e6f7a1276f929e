#pragma once

// Canonical JSON wire format shared by every instance.
//
// Encoding is canonical: object keys in byte order, no insignificant
// whitespace, UTF-8 emitted raw, numbers in shortest form without trailing
// zeros. Optional fields are omitted when absent and `warnings` only appears
// when non-empty. Decimal values travel as JSON numbers when a double holds
// them exactly and as strings of their canonical text otherwise; decoders
// accept either.

#include <cstddef>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dc/error.hpp"
#include "dc/federation/results.hpp"
#include "dc/ingest/pipeline.hpp"
#include "dc/kg/types.hpp"
#include "dc/resolver/resolver.hpp"
#include "dc/stat/stat_api.hpp"

namespace dc::api {

using Json = nlohmann::json;

// Malformed JSON text; offset is the byte where parsing failed.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::kDecode, message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

std::string encode(const Json& value);
// Throws DecodeError on syntax errors.
Json decode(std::string_view bytes);

Json error_body(std::string_view code, std::string_view message);

// Structural mismatches in from_json throw Error(kDecode).
template <class T>
T from_json(const Json& j);

Json to_json(const kg::Decimal& d);
Json to_json(const kg::NodeValue& v);
Json to_json(const kg::Triple& t);
Json to_json(const stat::Observation& o);
Json to_json(const stat::Series& s);
Json to_json(const resolver::Candidate& c);
Json to_json(const resolver::Description& d);
Json to_json(const federation::Warning& w);
Json to_json(const federation::ArcsResult& r);
Json to_json(const federation::TriplesResult& r);
Json to_json(const federation::ResolveResult& r);
Json to_json(const federation::PointResult& r);
Json to_json(const federation::SeriesResult& r);
Json to_json(const federation::CollectionResult& r);
Json to_json(const federation::VariablesResult& r);
Json to_json(const federation::InfoResult& r);
Json to_json(const ingest::ImportReport& r);

template <> kg::Decimal from_json(const Json& j);
template <> kg::NodeValue from_json(const Json& j);
template <> kg::Triple from_json(const Json& j);
template <> stat::Observation from_json(const Json& j);
template <> stat::Series from_json(const Json& j);
template <> resolver::Candidate from_json(const Json& j);
template <> resolver::Description from_json(const Json& j);
template <> federation::Warning from_json(const Json& j);
template <> federation::ArcsResult from_json(const Json& j);
template <> federation::TriplesResult from_json(const Json& j);
template <> federation::ResolveResult from_json(const Json& j);
template <> federation::PointResult from_json(const Json& j);
template <> federation::SeriesResult from_json(const Json& j);
template <> federation::CollectionResult from_json(const Json& j);
template <> federation::VariablesResult from_json(const Json& j);
template <> federation::InfoResult from_json(const Json& j);
template <> ingest::ImportReport from_json(const Json& j);

// Percent-encodes everything outside RFC 3986 unreserved characters, so a
// dcid like "country/GEO" becomes "country%2FGEO".
std::string percent_encode(std::string_view text);

}  // namespace dc::api
