#pragma once

#include <iosfwd>
#include <string>

#include "prefset/prefmodel.hpp"
#include "prefset/search_result.hpp"

namespace prefset {

// JSON readers; malformed input raises LoadError with the offending
// piece named. Loaded models are validated against the property set.
PropertySet load_properties(std::istream& in, const AttributeSchema& schema);
PropertySet load_properties_file(const std::string& path,
                                 const AttributeSchema& schema);
PreferenceModel load_model(std::istream& in, const PropertySet& props,
                           int catalog_size);
PreferenceModel load_model_file(const std::string& path,
                                const PropertySet& props, int catalog_size);

// JSON writers; output round-trips through the readers above.
std::string catalog_to_json(const Catalog& catalog);
std::string properties_to_json(const PropertySet& props,
                               const AttributeSchema& schema);
std::string model_to_json(const PreferenceModel& model,
                          const PropertySet& props);
std::string result_to_json(const SearchResult& result, const Catalog& catalog,
                           const PropertySet& props);

}  // namespace prefset
