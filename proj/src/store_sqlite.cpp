#include <sqlite3.h>

#include "histrec/errors.hpp"
#include "histrec/linker.hpp"
#include "histrec/store.hpp"

namespace histrec::store {

namespace {

// Kept in sync with migrations/001_init.sql.
constexpr const char* kSchemaSql = R"sql(
CREATE TABLE IF NOT EXISTS person (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    first_name TEXT,
    last_name TEXT,
    affix TEXT,
    alternative_last_name TEXT,
    rating INTEGER NOT NULL CHECK (rating IN (1, 2, 3)),
    faculty TEXT,
    type_of_person INTEGER,
    birth_city TEXT,
    birth_country TEXT,
    birth_date TEXT,
    death_date TEXT,
    death_city TEXT
);
CREATE TABLE IF NOT EXISTS person_name_key (
    person_id INTEGER NOT NULL REFERENCES person(id) ON DELETE CASCADE,
    name_key TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_person_name_key ON person_name_key(name_key);
CREATE TABLE IF NOT EXISTS education (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    person_id INTEGER NOT NULL REFERENCES person(id) ON DELETE CASCADE,
    subject TEXT,
    location TEXT,
    date TEXT,
    source TEXT
);
CREATE TABLE IF NOT EXISTS career (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    person_id INTEGER NOT NULL REFERENCES person(id) ON DELETE CASCADE,
    job TEXT,
    location TEXT,
    date TEXT,
    source TEXT,
    is_side_job INTEGER NOT NULL DEFAULT 0 CHECK (is_side_job IN (0, 1))
);
CREATE TABLE IF NOT EXISTS particularity (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    person_id INTEGER NOT NULL REFERENCES person(id) ON DELETE CASCADE,
    particularity TEXT NOT NULL,
    location TEXT,
    date TEXT,
    source TEXT
);
CREATE TABLE IF NOT EXISTS person_relation (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    new_person_id INTEGER NOT NULL REFERENCES person(id),
    suspected_person_id INTEGER NOT NULL REFERENCES person(id),
    CHECK (new_person_id <> suspected_person_id)
);
)sql";

class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw StoreError(std::string("prepare failed: ") + sqlite3_errmsg(db));
  }
  ~Stmt() { sqlite3_finalize(stmt_); }

  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int idx, const std::optional<std::string>& v) {
    int rc = v ? sqlite3_bind_text(stmt_, idx, v->c_str(), -1, SQLITE_TRANSIENT)
               : sqlite3_bind_null(stmt_, idx);
    check(rc);
    return *this;
  }
  Stmt& bind(int idx, const std::string& v) {
    check(sqlite3_bind_text(stmt_, idx, v.c_str(), -1, SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int idx, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, idx, v));
    return *this;
  }
  Stmt& bind(int idx, const std::optional<int>& v) {
    int rc = v ? sqlite3_bind_int(stmt_, idx, *v) : sqlite3_bind_null(stmt_, idx);
    check(rc);
    return *this;
  }

  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw StoreError(std::string("step failed: ") + sqlite3_errmsg(db_));
  }

  std::optional<std::string> column_text(int idx) {
    if (sqlite3_column_type(stmt_, idx) == SQLITE_NULL) return std::nullopt;
    return std::string(reinterpret_cast<const char*>(sqlite3_column_text(stmt_, idx)));
  }
  std::optional<int> column_int_opt(int idx) {
    if (sqlite3_column_type(stmt_, idx) == SQLITE_NULL) return std::nullopt;
    return sqlite3_column_int(stmt_, idx);
  }
  std::int64_t column_int64(int idx) { return sqlite3_column_int64(stmt_, idx); }
  int column_int(int idx) { return sqlite3_column_int(stmt_, idx); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw StoreError(std::string("bind failed: ") + sqlite3_errmsg(db_));
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

DbPerson read_person(Stmt& s) {
  DbPerson p;
  p.id = s.column_int64(0);
  p.first_name = s.column_text(1);
  p.last_name = s.column_text(2);
  p.affix = s.column_text(3);
  p.alternative_last_name = s.column_text(4);
  p.rating = s.column_int(5);
  p.faculty = s.column_text(6);
  p.type_of_person = s.column_int_opt(7);
  p.birth_city = s.column_text(8);
  p.birth_country = s.column_text(9);
  p.birth_date = s.column_text(10);
  p.death_date = s.column_text(11);
  p.death_city = s.column_text(12);
  return p;
}

constexpr const char* kPersonColumns =
    "id, first_name, last_name, affix, alternative_last_name, rating, faculty, "
    "type_of_person, birth_city, birth_country, birth_date, death_date, death_city";

}  // namespace

const char* schema_sql() { return kSchemaSql; }

SqliteStore::SqliteStore(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw StoreError("cannot open store at " + path + ": " + msg);
  }
  exec("PRAGMA foreign_keys = ON;");
  exec(kSchemaSql);
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

void SqliteStore::exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw StoreError("sqlite exec failed: " + msg);
  }
}

void SqliteStore::begin() { exec("BEGIN IMMEDIATE;"); }
void SqliteStore::commit() { exec("COMMIT;"); }
void SqliteStore::rollback() { exec("ROLLBACK;"); }

void SqliteStore::index_person_names(std::int64_t id,
                                     const std::optional<std::string>& last_name,
                                     const std::optional<std::string>& alternative_last_name) {
  {
    Stmt del(db_, "DELETE FROM person_name_key WHERE person_id = ?1;");
    del.bind(1, id);
    del.step();
  }
  for (const auto& key : linkage::name_keys(last_name, alternative_last_name)) {
    Stmt ins(db_, "INSERT INTO person_name_key (person_id, name_key) VALUES (?1, ?2);");
    ins.bind(1, id).bind(2, key);
    ins.step();
  }
}

std::vector<DbPerson> SqliteStore::find_by_name_keys(const std::vector<std::string>& keys) {
  std::vector<DbPerson> out;
  if (keys.empty()) return out;
  std::string sql = std::string("SELECT DISTINCT p.") + "id, p.first_name, p.last_name, p.affix, "
                    "p.alternative_last_name, p.rating, p.faculty, p.type_of_person, "
                    "p.birth_city, p.birth_country, p.birth_date, p.death_date, p.death_city "
                    "FROM person p JOIN person_name_key k ON k.person_id = p.id "
                    "WHERE k.name_key IN (";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0) sql += ",";
    sql += "?" + std::to_string(i + 1);
  }
  sql += ") ORDER BY p.id;";
  Stmt s(db_, sql.c_str());
  for (std::size_t i = 0; i < keys.size(); ++i) s.bind(static_cast<int>(i + 1), keys[i]);
  while (s.step()) out.push_back(read_person(s));
  return out;
}

std::int64_t SqliteStore::insert_person(const NewPerson& p) {
  if (p.rating < 1 || p.rating > 3)
    throw StoreError("rating must be 1, 2 or 3, got " + std::to_string(p.rating));
  Stmt s(db_,
         "INSERT INTO person (first_name, last_name, affix, alternative_last_name, rating, "
         "faculty, type_of_person, birth_city, birth_country, birth_date, death_date, death_city) "
         "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12);");
  s.bind(1, p.first_name)
      .bind(2, p.last_name)
      .bind(3, p.affix)
      .bind(4, p.alternative_last_name)
      .bind(5, static_cast<std::int64_t>(p.rating))
      .bind(6, p.faculty)
      .bind(7, p.type_of_person)
      .bind(8, p.birth_city)
      .bind(9, p.birth_country)
      .bind(10, p.birth_date)
      .bind(11, p.death_date)
      .bind(12, p.death_city);
  s.step();
  std::int64_t id = sqlite3_last_insert_rowid(db_);
  index_person_names(id, p.last_name, p.alternative_last_name);
  return id;
}

std::optional<DbPerson> SqliteStore::get_person(std::int64_t id) {
  std::string sql = std::string("SELECT ") + kPersonColumns + " FROM person WHERE id = ?1;";
  Stmt s(db_, sql.c_str());
  s.bind(1, id);
  if (!s.step()) return std::nullopt;
  return read_person(s);
}

void SqliteStore::update_person(const DbPerson& p) {
  if (p.rating < 1 || p.rating > 3)
    throw StoreError("rating must be 1, 2 or 3, got " + std::to_string(p.rating));
  Stmt s(db_,
         "UPDATE person SET first_name = ?1, last_name = ?2, affix = ?3, "
         "alternative_last_name = ?4, rating = ?5, faculty = ?6, type_of_person = ?7, "
         "birth_city = ?8, birth_country = ?9, birth_date = ?10, death_date = ?11, "
         "death_city = ?12 WHERE id = ?13;");
  s.bind(1, p.first_name)
      .bind(2, p.last_name)
      .bind(3, p.affix)
      .bind(4, p.alternative_last_name)
      .bind(5, static_cast<std::int64_t>(p.rating))
      .bind(6, p.faculty)
      .bind(7, p.type_of_person)
      .bind(8, p.birth_city)
      .bind(9, p.birth_country)
      .bind(10, p.birth_date)
      .bind(11, p.death_date)
      .bind(12, p.death_city)
      .bind(13, p.id);
  s.step();
  if (sqlite3_changes(db_) == 0)
    throw StoreError("update_person: no person with id " + std::to_string(p.id));
  index_person_names(p.id, p.last_name, p.alternative_last_name);
}

void SqliteStore::insert_relation(std::int64_t new_person_id, std::int64_t suspected_person_id) {
  if (new_person_id == suspected_person_id)
    throw StoreError("person_relation must reference two different persons");
  Stmt s(db_,
         "INSERT INTO person_relation (new_person_id, suspected_person_id) VALUES (?1, ?2);");
  s.bind(1, new_person_id).bind(2, suspected_person_id);
  s.step();
}

namespace {

std::size_t count_rows(sqlite3* db, const char* sql, std::optional<std::int64_t> id = {}) {
  Stmt s(db, sql);
  if (id) s.bind(1, *id);
  s.step();
  return static_cast<std::size_t>(s.column_int64(0));
}

}  // namespace

std::size_t SqliteStore::education_count(std::int64_t person_id) {
  return count_rows(db_, "SELECT COUNT(*) FROM education WHERE person_id = ?1;", person_id);
}
std::size_t SqliteStore::career_count(std::int64_t person_id) {
  return count_rows(db_, "SELECT COUNT(*) FROM career WHERE person_id = ?1;", person_id);
}
std::size_t SqliteStore::particularity_count(std::int64_t person_id) {
  return count_rows(db_, "SELECT COUNT(*) FROM particularity WHERE person_id = ?1;", person_id);
}

void SqliteStore::insert_education(std::int64_t person_id, const records::EducationEntry& e) {
  Stmt s(db_,
         "INSERT INTO education (person_id, subject, location, date, source) "
         "VALUES (?1, ?2, ?3, ?4, ?5);");
  s.bind(1, person_id).bind(2, e.subject).bind(3, e.location).bind(4, e.date).bind(5, e.source);
  s.step();
}

void SqliteStore::insert_career(std::int64_t person_id, const records::CareerEntry& c) {
  Stmt s(db_,
         "INSERT INTO career (person_id, job, location, date, source, is_side_job) "
         "VALUES (?1, ?2, ?3, ?4, ?5, ?6);");
  s.bind(1, person_id)
      .bind(2, c.job)
      .bind(3, c.location)
      .bind(4, c.date)
      .bind(5, c.source)
      .bind(6, static_cast<std::int64_t>(c.is_side_job));
  s.step();
}

void SqliteStore::insert_particularity(std::int64_t person_id,
                                       const records::ParticularityEntry& p) {
  Stmt s(db_,
         "INSERT INTO particularity (person_id, particularity, location, date, source) "
         "VALUES (?1, ?2, ?3, ?4, ?5);");
  s.bind(1, person_id)
      .bind(2, p.particularity)
      .bind(3, p.location)
      .bind(4, p.date)
      .bind(5, p.source);
  s.step();
}

std::size_t SqliteStore::person_count() {
  return count_rows(db_, "SELECT COUNT(*) FROM person;");
}
std::size_t SqliteStore::relation_count() {
  return count_rows(db_, "SELECT COUNT(*) FROM person_relation;");
}

}  // namespace histrec::store
