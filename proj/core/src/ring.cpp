#include "sqrgen/ring.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sqrgen/error.hpp"

namespace sqrgen {

using nlohmann::json;

const char* to_string(SemanticType t) {
  switch (t) {
    case SemanticType::Arithmetic: return "Arithmetic";
    case SemanticType::Datetime: return "Datetime";
    case SemanticType::Identifier: return "Identifier";
    case SemanticType::Categorical: return "Categorical";
    case SemanticType::Boolean: return "Boolean";
  }
  return "Categorical";
}

std::optional<SemanticType> semantic_type_from_string(const std::string& s) {
  if (s == "Arithmetic") return SemanticType::Arithmetic;
  if (s == "Datetime") return SemanticType::Datetime;
  if (s == "Identifier") return SemanticType::Identifier;
  if (s == "Categorical") return SemanticType::Categorical;
  if (s == "Boolean") return SemanticType::Boolean;
  return std::nullopt;
}

const Attribute* Entity::find_attribute(const std::string& attr_name) const {
  for (const auto& a : attributes)
    if (a.name == attr_name) return &a;
  return nullptr;
}

const Entity* Ring::find_entity(const std::string& entity_name) const {
  for (const auto& e : entities)
    if (e.name == entity_name) return &e;
  return nullptr;
}

std::vector<const Relationship*> Ring::relationships_of(const std::string& entity_name) const {
  std::vector<const Relationship*> out;
  for (const auto& r : relationships)
    if (r.from_entity == entity_name || r.to_entity == entity_name) out.push_back(&r);
  return out;
}

std::vector<std::string> Ring::connected_component(const std::string& start) const {
  std::set<std::string> seen{start};
  std::vector<std::string> frontier{start};
  while (!frontier.empty()) {
    std::string cur = frontier.back();
    frontier.pop_back();
    for (const auto& r : relationships) {
      std::string other;
      if (r.from_entity == cur) other = r.to_entity;
      else if (r.to_entity == cur) other = r.from_entity;
      else continue;
      if (seen.insert(other).second) frontier.push_back(other);
    }
  }
  return {seen.begin(), seen.end()};
}

std::string derive_nl_name(const std::string& identifier) {
  std::string out;
  char prev = '\0';
  for (size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (c == '_' || c == '-' || c == ' ') {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      bool boundary = std::isupper(static_cast<unsigned char>(c)) &&
                      (std::islower(static_cast<unsigned char>(prev)) ||
                       (i + 1 < identifier.size() &&
                        std::islower(static_cast<unsigned char>(identifier[i + 1])) &&
                        std::isupper(static_cast<unsigned char>(prev))));
      if (boundary && !out.empty() && out.back() != ' ') out += ' ';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    prev = c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out.empty() ? identifier : out;
}

namespace {

bool contains_icase(const std::string& haystack, const char* needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle, needle + std::strlen(needle),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

bool numeric_affinity(const std::string& declared) {
  return contains_icase(declared, "int") || contains_icase(declared, "real") ||
         contains_icase(declared, "floa") || contains_icase(declared, "doub") ||
         contains_icase(declared, "num") || contains_icase(declared, "dec");
}

bool datetime_affinity(const std::string& declared) {
  return contains_icase(declared, "date") || contains_icase(declared, "time") ||
         contains_icase(declared, "year");
}

bool boolean_declaration(const std::string& declared) {
  return contains_icase(declared, "bool") || contains_icase(declared, "bit");
}

bool all_digits(const std::string& s, size_t from, size_t to) {
  if (to > s.size() || from >= to) return false;
  for (size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// ISO-like (2001-05-24, 2001/05/24, with optional time part) or slash dates
// like 24/05/2001. A bare number is never a date.
bool looks_like_date(const std::string& s) {
  if (s.size() < 8 || s.size() > 29) return false;
  if (all_digits(s, 0, 4) && (s[4] == '-' || s[4] == '/')) {
    char sep = s[4];
    if (!(all_digits(s, 5, 7) && s.size() >= 10 && s[7] == sep && all_digits(s, 8, 10)))
      return false;
    if (s.size() == 10) return true;
    return s[10] == ' ' || s[10] == 'T';
  }
  if (all_digits(s, 0, 2) && s[2] == '/' && all_digits(s, 3, 5) && s[5] == '/' &&
      all_digits(s, 6, 10) && s.size() == 10)
    return true;
  return false;
}

bool boolean_like(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) {
    int64_t i = std::get<int64_t>(v);
    return i == 0 || i == 1;
  }
  if (std::holds_alternative<std::string>(v)) {
    std::string s = std::get<std::string>(v);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s == "0" || s == "1" || s == "true" || s == "false";
  }
  return false;
}

}  // namespace

SemanticType infer_semantic_type(const std::string& declared_type,
                                 const std::vector<Value>& sample_values,
                                 bool single_column_pk, bool unique) {
  std::vector<const Value*> non_null;
  for (const auto& v : sample_values)
    if (!is_null(v)) non_null.push_back(&v);

  bool text_affinity = !numeric_affinity(declared_type) && !datetime_affinity(declared_type);
  if (single_column_pk || (unique && text_affinity)) return SemanticType::Identifier;

  if (boolean_declaration(declared_type)) {
    bool all_bool = std::all_of(non_null.begin(), non_null.end(),
                                [](const Value* v) { return boolean_like(*v); });
    if (all_bool) return SemanticType::Boolean;
  }

  if (datetime_affinity(declared_type)) return SemanticType::Datetime;
  if (!non_null.empty()) {
    size_t dateish = 0;
    for (const Value* v : non_null)
      if (std::holds_alternative<std::string>(*v) && looks_like_date(std::get<std::string>(*v)))
        ++dateish;
    if (dateish * 10 >= non_null.size() * 9) return SemanticType::Datetime;
  }

  if (numeric_affinity(declared_type)) return SemanticType::Arithmetic;
  return SemanticType::Categorical;
}

Ring generate_ring(const Database& db) {
  std::vector<std::string> tables = db.table_names();
  if (tables.empty()) throw EmptySchema("database has no tables: " + db.path());

  Ring ring;
  ring.db_id = std::filesystem::path(db.path()).stem().string();

  for (const auto& table : tables) {
    Entity entity;
    entity.name = table;
    entity.nl_name = derive_nl_name(table);
    entity.table = table;

    auto columns = db.table_info(table);
    if (columns.empty()) throw IntrospectionFailure("table has no columns: " + table);
    auto uniques = db.unique_columns(table);
    int pk_count = static_cast<int>(
        std::count_if(columns.begin(), columns.end(), [](const ColumnInfo& c) { return c.primary_key; }));

    for (const auto& col : columns) {
      ResultTable sample = db.query("select " + quote_identifier(col.name) + " from " +
                                    quote_identifier(table) + " limit 100");
      std::vector<Value> values;
      for (auto& row : sample.rows) values.push_back(row[0]);

      bool unique = std::find(uniques.begin(), uniques.end(), col.name) != uniques.end();
      Attribute attr;
      attr.name = col.name;
      attr.nl_name = derive_nl_name(col.name);
      attr.column = col.name;
      attr.semantic_type = infer_semantic_type(col.declared_type, values,
                                               col.primary_key && pk_count == 1, unique);
      attr.nullable = !col.not_null && !col.primary_key;
      entity.attributes.push_back(std::move(attr));
    }

    // Identifying attribute: single-column pk, else first unique text column,
    // else the first column. Composite keys fall back to their first column.
    std::string id_attr;
    if (pk_count >= 1) {
      for (const auto& col : columns)
        if (col.primary_key) { id_attr = col.name; break; }
    }
    if (id_attr.empty()) {
      for (const auto& a : entity.attributes) {
        bool unique = std::find(uniques.begin(), uniques.end(), a.name) != uniques.end();
        if (unique && a.semantic_type == SemanticType::Identifier) { id_attr = a.name; break; }
      }
    }
    if (id_attr.empty()) id_attr = entity.attributes.front().name;
    entity.id_attribute = id_attr;
    ring.entities.push_back(std::move(entity));
  }

  std::map<std::pair<std::string, std::string>, int> pair_counts;
  for (const auto& table : tables) {
    for (const auto& fk : db.foreign_keys(table)) {
      Relationship rel;
      rel.from_entity = fk.table;
      rel.to_entity = fk.ref_table;
      rel.join_pairs = fk.column_pairs;
      int n = pair_counts[{fk.table, fk.ref_table}]++;
      rel.name = fk.table + "_" + fk.ref_table + (n ? "_" + std::to_string(n + 1) : "");
      ring.relationships.push_back(std::move(rel));
    }
  }
  return ring;
}

namespace {

json ring_to_json(const Ring& ring) {
  json j;
  j["db_id"] = ring.db_id;
  j["entities"] = json::array();
  for (const auto& e : ring.entities) {
    json je;
    je["name"] = e.name;
    je["nl_name"] = e.nl_name;
    je["table"] = e.table;
    je["id_attribute"] = e.id_attribute;
    je["attributes"] = json::array();
    for (const auto& a : e.attributes) {
      je["attributes"].push_back({{"name", a.name},
                                  {"nl_name", a.nl_name},
                                  {"column", a.column},
                                  {"semantic_type", to_string(a.semantic_type)},
                                  {"nullable", a.nullable}});
    }
    j["entities"].push_back(std::move(je));
  }
  j["relationships"] = json::array();
  for (const auto& r : ring.relationships) {
    json jr;
    jr["name"] = r.name;
    jr["from_entity"] = r.from_entity;
    jr["to_entity"] = r.to_entity;
    jr["join_pairs"] = json::array();
    for (const auto& [from, to] : r.join_pairs) jr["join_pairs"].push_back({from, to});
    j["relationships"].push_back(std::move(jr));
  }
  return j;
}

template <typename T>
T require_field(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field))
    throw MalformedRingFile("missing field '" + std::string(field) + "' in " + where);
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw MalformedRingFile("bad field '" + std::string(field) + "' in " + where + ": " + e.what());
  }
}

}  // namespace

void save_ring(const Ring& ring, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write ring file: " + path);
  out << ring_to_json(ring).dump(2) << "\n";
}

Ring load_ring(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedRingFile("cannot read ring file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw MalformedRingFile(std::string("invalid ring file: ") + e.what());
  }

  Ring ring;
  ring.db_id = require_field<std::string>(j, "db_id", "ring");
  if (!j.contains("entities")) throw MalformedRingFile("missing field 'entities' in ring");
  for (const auto& je : j.at("entities")) {
    Entity e;
    e.name = require_field<std::string>(je, "name", "entity");
    e.nl_name = require_field<std::string>(je, "nl_name", "entity " + e.name);
    e.table = require_field<std::string>(je, "table", "entity " + e.name);
    e.id_attribute = require_field<std::string>(je, "id_attribute", "entity " + e.name);
    if (!je.contains("attributes"))
      throw MalformedRingFile("missing field 'attributes' in entity " + e.name);
    for (const auto& ja : je.at("attributes")) {
      Attribute a;
      a.name = require_field<std::string>(ja, "name", "attribute of " + e.name);
      a.nl_name = require_field<std::string>(ja, "nl_name", "attribute " + a.name);
      a.column = require_field<std::string>(ja, "column", "attribute " + a.name);
      auto type_name = require_field<std::string>(ja, "semantic_type", "attribute " + a.name);
      auto type = semantic_type_from_string(type_name);
      if (!type)
        throw MalformedRingFile("unknown semantic_type '" + type_name + "' in attribute " + a.name);
      a.semantic_type = *type;
      a.nullable = require_field<bool>(ja, "nullable", "attribute " + a.name);
      e.attributes.push_back(std::move(a));
    }
    if (!e.find_attribute(e.id_attribute))
      throw MalformedRingFile("id_attribute '" + e.id_attribute + "' not an attribute of entity " +
                              e.name);
    ring.entities.push_back(std::move(e));
  }
  if (!j.contains("relationships")) throw MalformedRingFile("missing field 'relationships' in ring");
  for (const auto& jr : j.at("relationships")) {
    Relationship r;
    r.name = require_field<std::string>(jr, "name", "relationship");
    r.from_entity = require_field<std::string>(jr, "from_entity", "relationship " + r.name);
    r.to_entity = require_field<std::string>(jr, "to_entity", "relationship " + r.name);
    if (!jr.contains("join_pairs") || jr.at("join_pairs").empty())
      throw MalformedRingFile("relationship " + r.name + " needs non-empty join_pairs");
    for (const auto& jp : jr.at("join_pairs")) {
      if (!jp.is_array() || jp.size() != 2)
        throw MalformedRingFile("join pair in " + r.name + " must be [from_column, to_column]");
      r.join_pairs.emplace_back(jp[0].get<std::string>(), jp[1].get<std::string>());
    }
    if (!ring.find_entity(r.from_entity) || !ring.find_entity(r.to_entity))
      throw MalformedRingFile("relationship " + r.name + " references unknown entity");
    ring.relationships.push_back(std::move(r));
  }
  return ring;
}

}  // namespace sqrgen
