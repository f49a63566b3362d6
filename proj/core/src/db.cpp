#include "sqrgen/db.hpp"

#include <sqlite3.h>

#include <utility>

#include "sqrgen/error.hpp"

namespace sqrgen {

Database::Database(const std::string& path, bool writable) : path_(path) {
  int flags = writable ? (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE) : SQLITE_OPEN_READONLY;
  if (sqlite3_open_v2(path.c_str(), &handle_, flags, nullptr) != SQLITE_OK) {
    std::string msg = handle_ ? sqlite3_errmsg(handle_) : "out of memory";
    sqlite3_close(handle_);
    handle_ = nullptr;
    throw SqlExecutionError("cannot open database '" + path + "': " + msg);
  }
  sqlite3_busy_timeout(handle_, 5000);
}

Database::~Database() {
  if (handle_) sqlite3_close(handle_);
}

Database::Database(Database&& other) noexcept
    : handle_(std::exchange(other.handle_, nullptr)), path_(std::move(other.path_)) {}

Database& Database::operator=(Database&& other) noexcept {
  if (this != &other) {
    if (handle_) sqlite3_close(handle_);
    handle_ = std::exchange(other.handle_, nullptr);
    path_ = std::move(other.path_);
  }
  return *this;
}

ResultTable Database::query(const std::string& sql) const {
  sqlite3_stmt* stmt = nullptr;
  if (sqlite3_prepare_v2(handle_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
    std::string msg = sqlite3_errmsg(handle_);
    sqlite3_finalize(stmt);
    throw SqlExecutionError(msg);
  }
  ResultTable out;
  int ncols = sqlite3_column_count(stmt);
  out.column_names.reserve(ncols);
  for (int i = 0; i < ncols; ++i) {
    const char* name = sqlite3_column_name(stmt, i);
    out.column_names.emplace_back(name ? name : "");
  }
  int rc;
  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    std::vector<Value> row;
    row.reserve(ncols);
    for (int i = 0; i < ncols; ++i) {
      switch (sqlite3_column_type(stmt, i)) {
        case SQLITE_INTEGER:
          row.emplace_back(static_cast<int64_t>(sqlite3_column_int64(stmt, i)));
          break;
        case SQLITE_FLOAT:
          row.emplace_back(sqlite3_column_double(stmt, i));
          break;
        case SQLITE_NULL:
          row.emplace_back(std::monostate{});
          break;
        default: {
          // TEXT and BLOB both come back as bytes.
          const unsigned char* text = sqlite3_column_text(stmt, i);
          int n = sqlite3_column_bytes(stmt, i);
          row.emplace_back(std::string(reinterpret_cast<const char*>(text), n));
          break;
        }
      }
    }
    out.rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    std::string msg = sqlite3_errmsg(handle_);
    sqlite3_finalize(stmt);
    throw SqlExecutionError(msg);
  }
  sqlite3_finalize(stmt);
  return out;
}

void Database::exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(handle_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw SqlExecutionError(msg);
  }
}

std::vector<std::string> Database::table_names() const {
  ResultTable t;
  try {
    t = query(
        "select name from sqlite_master where type = 'table' "
        "and name not like 'sqlite_%' order by name");
  } catch (const SqlExecutionError& e) {
    throw IntrospectionFailure(e.what());
  }
  std::vector<std::string> names;
  for (const auto& row : t.rows) names.push_back(std::get<std::string>(row[0]));
  return names;
}

std::vector<ColumnInfo> Database::table_info(const std::string& table) const {
  ResultTable t;
  try {
    t = query("pragma table_info(" + quote_identifier(table) + ")");
  } catch (const SqlExecutionError& e) {
    throw IntrospectionFailure(e.what());
  }
  std::vector<ColumnInfo> cols;
  for (const auto& row : t.rows) {
    // cid, name, type, notnull, dflt_value, pk
    ColumnInfo c;
    c.name = std::get<std::string>(row[1]);
    c.declared_type = std::holds_alternative<std::string>(row[2]) ? std::get<std::string>(row[2]) : "";
    c.not_null = std::get<int64_t>(row[3]) != 0;
    c.primary_key = std::get<int64_t>(row[5]) != 0;
    cols.push_back(std::move(c));
  }
  return cols;
}

std::vector<ForeignKey> Database::foreign_keys(const std::string& table) const {
  ResultTable t;
  try {
    t = query("pragma foreign_key_list(" + quote_identifier(table) + ")");
  } catch (const SqlExecutionError& e) {
    throw IntrospectionFailure(e.what());
  }
  // columns: id, seq, table, from, to, on_update, on_delete, match
  std::vector<ForeignKey> fks;
  int64_t current_id = -1;
  for (const auto& row : t.rows) {
    int64_t id = std::get<int64_t>(row[0]);
    if (id != current_id) {
      ForeignKey fk;
      fk.table = table;
      fk.ref_table = std::get<std::string>(row[2]);
      fks.push_back(std::move(fk));
      current_id = id;
    }
    std::string from = std::get<std::string>(row[3]);
    // `to` is null when the FK references the implicit primary key.
    std::string to = std::holds_alternative<std::string>(row[4]) ? std::get<std::string>(row[4]) : "";
    if (to.empty()) {
      for (const auto& c : table_info(fks.back().ref_table))
        if (c.primary_key) { to = c.name; break; }
    }
    fks.back().column_pairs.emplace_back(from, to);
  }
  return fks;
}

std::vector<std::string> Database::unique_columns(const std::string& table) const {
  std::vector<std::string> out;
  ResultTable indexes;
  try {
    indexes = query("pragma index_list(" + quote_identifier(table) + ")");
  } catch (const SqlExecutionError&) {
    return out;
  }
  // columns: seq, name, unique, origin, partial
  for (const auto& row : indexes.rows) {
    if (std::get<int64_t>(row[2]) == 0) continue;
    std::string index_name = std::get<std::string>(row[1]);
    ResultTable cols = query("pragma index_info(" + quote_identifier(index_name) + ")");
    if (cols.rows.size() == 1 && std::holds_alternative<std::string>(cols.rows[0][2]))
      out.push_back(std::get<std::string>(cols.rows[0][2]));
  }
  return out;
}

std::vector<std::string> Database::schema_ddl() const {
  ResultTable t = query(
      "select sql from sqlite_master where type = 'table' "
      "and name not like 'sqlite_%' and sql is not null order by name");
  std::vector<std::string> ddl;
  for (const auto& row : t.rows) ddl.push_back(std::get<std::string>(row[0]));
  return ddl;
}

std::string quote_identifier(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace sqrgen
