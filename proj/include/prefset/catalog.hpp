#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace prefset {

enum class AttrKind { categorical, integer };

struct AttributeDef {
  std::string name;
  AttrKind kind = AttrKind::categorical;
  std::vector<std::string> domain;               // categorical only, non-empty
  std::optional<std::pair<long, long>> range;    // integer only, optional
};

// Fixed, ordered attribute list. Names unique; categorical domains
// non-empty and duplicate-free.
class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<AttributeDef> attrs);

  int size() const { return static_cast<int>(attrs_.size()); }
  const AttributeDef& at(int i) const { return attrs_.at(i); }
  int index_of(const std::string& name) const;   // -1 when absent
  int value_index(int attr, const std::string& value) const;  // -1 when absent

  bool operator==(const AttributeSchema& other) const;

 private:
  std::vector<AttributeDef> attrs_;
  std::unordered_map<std::string, int> by_name_;
};

// One value per schema attribute: categorical values stored as domain
// indices, integers as-is.
struct Item {
  std::string id;
  std::vector<long> values;
};

class Catalog {
 public:
  Catalog() = default;
  Catalog(AttributeSchema schema, std::vector<Item> items);

  const AttributeSchema& schema() const { return schema_; }
  int size() const { return static_cast<int>(items_.size()); }
  const Item& item(int i) const { return items_.at(i); }
  const std::vector<Item>& items() const { return items_; }
  int index_of(const std::string& id) const;     // -1 when absent

  std::string value_text(int item, int attr) const;

 private:
  AttributeSchema schema_;
  std::vector<Item> items_;
  std::unordered_map<std::string, int> by_id_;
};

struct LoadError : std::runtime_error {
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

enum class CatalogFormat { csv, json };

// CSV needs the schema up front; JSON embeds one (a schema passed anyway
// must match it).
Catalog load_catalog(std::istream& in, CatalogFormat format,
                     const AttributeSchema* schema = nullptr);
Catalog load_catalog_file(const std::string& path,
                          const AttributeSchema* schema = nullptr);

AttributeSchema load_schema_file(const std::string& path);

}  // namespace prefset
