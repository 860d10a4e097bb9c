#include "prefset/catalog.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace prefset {

namespace {

std::string quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace

AttributeSchema::AttributeSchema(std::vector<AttributeDef> attrs)
    : attrs_(std::move(attrs)) {
  for (int i = 0; i < static_cast<int>(attrs_.size()); ++i) {
    const AttributeDef& a = attrs_[i];
    if (a.name.empty()) throw LoadError("attribute with empty name");
    if (!by_name_.emplace(a.name, i).second)
      throw LoadError("duplicate attribute name " + quote(a.name));
    if (a.kind == AttrKind::categorical) {
      if (a.domain.empty())
        throw LoadError("attribute " + quote(a.name) + " has an empty domain");
      std::set<std::string> seen;
      for (const std::string& v : a.domain)
        if (!seen.insert(v).second)
          throw LoadError("attribute " + quote(a.name) +
                          " repeats domain value " + quote(v));
    } else if (a.range && a.range->first > a.range->second) {
      throw LoadError("attribute " + quote(a.name) + " has an empty range");
    }
  }
}

int AttributeSchema::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

int AttributeSchema::value_index(int attr, const std::string& value) const {
  const AttributeDef& a = attrs_.at(attr);
  for (int i = 0; i < static_cast<int>(a.domain.size()); ++i)
    if (a.domain[i] == value) return i;
  return -1;
}

bool AttributeSchema::operator==(const AttributeSchema& other) const {
  if (attrs_.size() != other.attrs_.size()) return false;
  for (size_t i = 0; i < attrs_.size(); ++i) {
    const AttributeDef& a = attrs_[i];
    const AttributeDef& b = other.attrs_[i];
    if (a.name != b.name || a.kind != b.kind || a.domain != b.domain ||
        a.range != b.range)
      return false;
  }
  return true;
}

Catalog::Catalog(AttributeSchema schema, std::vector<Item> items)
    : schema_(std::move(schema)), items_(std::move(items)) {
  for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
    const Item& it = items_[i];
    if (it.id.empty()) throw LoadError("item with empty id");
    if (!by_id_.emplace(it.id, i).second)
      throw LoadError("duplicate item id " + quote(it.id));
    if (static_cast<int>(it.values.size()) != schema_.size())
      throw LoadError("item " + quote(it.id) + " has " +
                      std::to_string(it.values.size()) + " values, schema has " +
                      std::to_string(schema_.size()));
    for (int a = 0; a < schema_.size(); ++a) {
      const AttributeDef& def = schema_.at(a);
      long v = it.values[a];
      if (def.kind == AttrKind::categorical) {
        if (v < 0 || v >= static_cast<long>(def.domain.size()))
          throw LoadError("item " + quote(it.id) + ": value index " +
                          std::to_string(v) + " outside the domain of " +
                          quote(def.name));
      } else if (def.range && (v < def.range->first || v > def.range->second)) {
        throw LoadError("item " + quote(it.id) + ": " + std::to_string(v) +
                        " outside the range of " + quote(def.name));
      }
    }
  }
}

int Catalog::index_of(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? -1 : it->second;
}

std::string Catalog::value_text(int item, int attr) const {
  const AttributeDef& def = schema_.at(attr);
  long v = items_.at(item).values.at(attr);
  if (def.kind == AttrKind::categorical) return def.domain.at(v);
  return std::to_string(v);
}

namespace {

// One CSV record; handles quoted fields with "" escapes. Returns false at
// end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& out,
                     int& line_no) {
  out.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string field;
  bool in_quotes = false;
  size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (in_quotes) {
        // Embedded newline inside a quoted field.
        if (!std::getline(in, line))
          throw LoadError("line " + std::to_string(line_no) +
                          ": unterminated quoted field");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        field += '\n';
        i = 0;
        continue;
      }
      out.push_back(field);
      return true;
    }
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
      ++i;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
      ++i;
    } else {
      field += c;
      ++i;
    }
  }
}

long parse_integer(const std::string& text, const std::string& where) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
    throw LoadError(where + ": " + quote(text) + " is not an integer");
  }
  if (pos != text.size())
    throw LoadError(where + ": " + quote(text) + " is not an integer");
  return v;
}

Catalog load_csv(std::istream& in, const AttributeSchema& schema) {
  int line_no = 0;
  std::vector<std::string> header;
  if (!read_csv_record(in, header, line_no))
    throw LoadError("empty catalog: missing header row");
  if (header.empty() || header[0] != "id")
    throw LoadError("header must start with 'id'");
  std::vector<int> columns;  // attribute index per data column
  std::vector<bool> seen(schema.size(), false);
  for (size_t c = 1; c < header.size(); ++c) {
    int a = schema.index_of(header[c]);
    if (a < 0)
      throw LoadError("header names unknown attribute " + quote(header[c]));
    if (seen[a])
      throw LoadError("header repeats attribute " + quote(header[c]));
    seen[a] = true;
    columns.push_back(a);
  }
  for (int a = 0; a < schema.size(); ++a)
    if (!seen[a])
      throw LoadError("header is missing attribute " +
                      quote(schema.at(a).name));

  std::vector<Item> items;
  std::vector<std::string> row;
  while (read_csv_record(in, row, line_no)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::string where = "line " + std::to_string(line_no);
    if (row.size() != header.size())
      throw LoadError(where + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(row.size()));
    Item item;
    item.id = row[0];
    item.values.assign(schema.size(), 0);
    for (size_t c = 1; c < row.size(); ++c) {
      int a = columns[c - 1];
      const AttributeDef& def = schema.at(a);
      if (def.kind == AttrKind::categorical) {
        int vi = schema.value_index(a, row[c]);
        if (vi < 0)
          throw LoadError(where + ": " + quote(row[c]) +
                          " is outside the domain of " + quote(def.name));
        item.values[a] = vi;
      } else {
        item.values[a] = parse_integer(row[c], where);
      }
    }
    items.push_back(std::move(item));
  }
  return Catalog(schema, std::move(items));
}

AttributeSchema schema_from_json(const nlohmann::json& js) {
  if (!js.contains("attributes") || !js["attributes"].is_array())
    throw LoadError("schema: missing 'attributes' array");
  std::vector<AttributeDef> attrs;
  for (const auto& a : js["attributes"]) {
    AttributeDef def;
    def.name = a.at("name").get<std::string>();
    std::string kind = a.value("kind", "categorical");
    if (kind == "categorical") {
      def.kind = AttrKind::categorical;
      for (const auto& v : a.at("domain"))
        def.domain.push_back(v.get<std::string>());
    } else if (kind == "integer") {
      def.kind = AttrKind::integer;
      if (a.contains("range")) {
        const auto& r = a["range"];
        def.range = {r.at(0).get<long>(), r.at(1).get<long>()};
      }
    } else {
      throw LoadError("schema: attribute " + quote(def.name) +
                      " has unknown kind " + quote(kind));
    }
    attrs.push_back(std::move(def));
  }
  return AttributeSchema(std::move(attrs));
}

Catalog load_json(std::istream& in, const AttributeSchema* expected) {
  nlohmann::json js;
  try {
    in >> js;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("catalog JSON: ") + e.what());
  }
  if (!js.contains("schema")) throw LoadError("catalog JSON: missing 'schema'");
  AttributeSchema schema = schema_from_json(js["schema"]);
  if (expected && !(schema == *expected))
    throw LoadError("catalog JSON: embedded schema disagrees with the given one");
  std::vector<Item> items;
  for (const auto& entry : js.value("items", nlohmann::json::array())) {
    Item item;
    item.id = entry.at("id").get<std::string>();
    item.values.assign(schema.size(), 0);
    const auto& values = entry.at("values");
    for (int a = 0; a < schema.size(); ++a) {
      const AttributeDef& def = schema.at(a);
      if (!values.contains(def.name))
        throw LoadError("item " + quote(item.id) + ": missing value for " +
                        quote(def.name));
      const auto& v = values[def.name];
      if (def.kind == AttrKind::categorical) {
        int vi = schema.value_index(a, v.get<std::string>());
        if (vi < 0)
          throw LoadError("item " + quote(item.id) + ": " +
                          quote(v.get<std::string>()) +
                          " is outside the domain of " + quote(def.name));
        item.values[a] = vi;
      } else {
        if (!v.is_number_integer())
          throw LoadError("item " + quote(item.id) + ": value for " +
                          quote(def.name) + " is not an integer");
        item.values[a] = v.get<long>();
      }
    }
    items.push_back(std::move(item));
  }
  return Catalog(std::move(schema), std::move(items));
}

}  // namespace

Catalog load_catalog(std::istream& in, CatalogFormat format,
                     const AttributeSchema* schema) {
  if (format == CatalogFormat::csv) {
    if (!schema) throw LoadError("CSV catalogs need a schema");
    return load_csv(in, *schema);
  }
  return load_json(in, schema);
}

Catalog load_catalog_file(const std::string& path,
                          const AttributeSchema* schema) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + quote(path));
  bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return load_catalog(in, csv ? CatalogFormat::csv : CatalogFormat::json,
                      schema);
}

AttributeSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + quote(path));
  nlohmann::json js;
  try {
    in >> js;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("schema JSON: ") + e.what());
  }
  return schema_from_json(js);
}

}  // namespace prefset
