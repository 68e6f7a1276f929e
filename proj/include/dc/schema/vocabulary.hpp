#pragma once

#include <cstddef>
#include <vector>

#include "dc/kg/store.hpp"
#include "dc/kg/types.hpp"

namespace dc::schema {

// The bundled core vocabulary as triples under prov/core-vocab. Stable
// across calls.
const std::vector<kg::Triple>& load_core_vocabulary();
const kg::Provenance& core_vocabulary_provenance();

// Registers the core provenance and inserts the vocabulary. Returns the
// number of triples newly stored (0 when already present).
std::size_t ensure_core_vocabulary(kg::Store& store);

}  // namespace dc::schema
