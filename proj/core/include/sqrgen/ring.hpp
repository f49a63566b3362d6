#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqrgen/db.hpp"
#include "sqrgen/value.hpp"

namespace sqrgen {

enum class SemanticType { Arithmetic, Datetime, Identifier, Categorical, Boolean };

const char* to_string(SemanticType t);
std::optional<SemanticType> semantic_type_from_string(const std::string& s);

struct Attribute {
  std::string name;
  std::string nl_name;
  std::string column;
  SemanticType semantic_type = SemanticType::Categorical;
  bool nullable = true;

  bool operator==(const Attribute&) const = default;
};

struct Entity {
  std::string name;
  std::string nl_name;
  std::string table;
  std::string id_attribute;
  std::vector<Attribute> attributes;

  const Attribute* find_attribute(const std::string& attr_name) const;

  bool operator==(const Entity&) const = default;
};

struct Relationship {
  std::string name;
  std::string from_entity;  // the foreign-key side (many)
  std::string to_entity;    // the referenced side (one)
  std::vector<std::pair<std::string, std::string>> join_pairs;  // (from_column, to_column)

  bool operator==(const Relationship&) const = default;
};

/// Semantic layer over one database: entities, typed attributes with
/// natural-language names, and the join relationships between them.
struct Ring {
  std::string db_id;
  std::vector<Entity> entities;
  std::vector<Relationship> relationships;

  const Entity* find_entity(const std::string& entity_name) const;
  /// Entity names in the same relationship-graph component as `start`.
  std::vector<std::string> connected_component(const std::string& start) const;
  /// Relationships touching the given entity, in declaration order.
  std::vector<const Relationship*> relationships_of(const std::string& entity_name) const;

  bool operator==(const Ring&) const = default;
};

/// Builds a Ring from the live schema: one entity per table, one attribute per
/// column, one relationship per foreign-key constraint.
Ring generate_ring(const Database& db);

/// Classifies a column. Works from declared type, key/uniqueness flags, and up
/// to 100 sampled values; always returns a type.
SemanticType infer_semantic_type(const std::string& declared_type,
                                 const std::vector<Value>& sample_values,
                                 bool single_column_pk = false,
                                 bool unique = false);

/// Turns an identifier into readable words: underscores and camel-case
/// boundaries become spaces, everything lowercased.
std::string derive_nl_name(const std::string& identifier);

void save_ring(const Ring& ring, const std::string& path);
Ring load_ring(const std::string& path);

}  // namespace sqrgen
