#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqrgen/value.hpp"

struct sqlite3;

namespace sqrgen {

/// Rows returned by a query. All rows have exactly column_names.size() cells.
struct ResultTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<Value>> rows;

  bool empty() const { return rows.empty(); }
};

/// One column of PRAGMA table_info output.
struct ColumnInfo {
  std::string name;
  std::string declared_type;
  bool not_null = false;
  bool primary_key = false;  // part of the primary key
};

/// One foreign-key constraint, possibly spanning several column pairs.
struct ForeignKey {
  std::string table;        // referencing table
  std::string ref_table;    // referenced table
  std::vector<std::pair<std::string, std::string>> column_pairs;  // (from, to)
};

/// RAII wrapper around a SQLite handle.
class Database {
 public:
  /// Opens an existing file read-only by default; writable for fixtures.
  explicit Database(const std::string& path, bool writable = false);
  ~Database();

  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;
  Database(Database&& other) noexcept;
  Database& operator=(Database&& other) noexcept;

  /// Runs a query and collects all rows. Throws SqlExecutionError with the
  /// engine message verbatim.
  ResultTable query(const std::string& sql) const;

  /// Runs one or more statements, discarding output (fixtures, DDL).
  void exec(const std::string& sql);

  std::vector<std::string> table_names() const;
  std::vector<ColumnInfo> table_info(const std::string& table) const;
  std::vector<ForeignKey> foreign_keys(const std::string& table) const;
  /// Columns covered by single-column unique indexes (incl. UNIQUE constraints).
  std::vector<std::string> unique_columns(const std::string& table) const;
  /// CREATE statements of all tables, as stored in the schema.
  std::vector<std::string> schema_ddl() const;

  const std::string& path() const { return path_; }

 private:
  sqlite3* handle_ = nullptr;
  std::string path_;
};

/// Double-quotes an identifier for SQLite, doubling embedded quotes.
std::string quote_identifier(const std::string& name);

}  // namespace sqrgen
