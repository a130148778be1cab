#pragma once

// Thin storage interface over the central person database, plus the SQLite
// reference backend. The schema lives in migrations/001_init.sql and is
// also embedded so fresh stores can bootstrap themselves.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "histrec/records.hpp"

struct sqlite3;

namespace histrec::store {

struct DbPerson {
  std::int64_t id = 0;
  std::optional<std::string> first_name;
  std::optional<std::string> last_name;
  std::optional<std::string> affix;
  // May carry several alternatives separated by ';'.
  std::optional<std::string> alternative_last_name;
  int rating = 3;  // 3 original, 2 matched/enriched, 1 pipeline-created
  std::optional<std::string> faculty;
  std::optional<int> type_of_person;
  std::optional<std::string> birth_city;
  std::optional<std::string> birth_country;
  std::optional<std::string> birth_date;  // PartialDate string
  std::optional<std::string> death_date;
  std::optional<std::string> death_city;
};

struct NewPerson {
  std::optional<std::string> first_name;
  std::optional<std::string> last_name;
  std::optional<std::string> affix;
  std::optional<std::string> alternative_last_name;
  int rating = 1;
  std::optional<std::string> faculty;
  std::optional<int> type_of_person;
  std::optional<std::string> birth_city;
  std::optional<std::string> birth_country;
  std::optional<std::string> birth_date;
  std::optional<std::string> death_date;
  std::optional<std::string> death_city;
};

class PersonStore {
 public:
  virtual ~PersonStore() = default;

  virtual void begin() = 0;
  virtual void commit() = 0;
  virtual void rollback() = 0;

  // Candidates whose normalized last name (primary or alternative) equals
  // any of the keys; ordered by ascending id.
  virtual std::vector<DbPerson> find_by_name_keys(const std::vector<std::string>& keys) = 0;

  virtual std::int64_t insert_person(const NewPerson& person) = 0;
  virtual std::optional<DbPerson> get_person(std::int64_t id) = 0;
  // Persists scalar columns and rating of an existing row (names included);
  // refreshes the name index.
  virtual void update_person(const DbPerson& person) = 0;

  virtual void insert_relation(std::int64_t new_person_id, std::int64_t suspected_person_id) = 0;

  virtual std::size_t education_count(std::int64_t person_id) = 0;
  virtual std::size_t career_count(std::int64_t person_id) = 0;
  virtual std::size_t particularity_count(std::int64_t person_id) = 0;

  virtual void insert_education(std::int64_t person_id, const records::EducationEntry& e) = 0;
  virtual void insert_career(std::int64_t person_id, const records::CareerEntry& c) = 0;
  virtual void insert_particularity(std::int64_t person_id,
                                    const records::ParticularityEntry& p) = 0;

  virtual std::size_t person_count() = 0;
  virtual std::size_t relation_count() = 0;
};

class SqliteStore final : public PersonStore {
 public:
  // Opens (and bootstraps, if needed) a store at `path`; ":memory:" works.
  explicit SqliteStore(const std::string& path);
  ~SqliteStore() override;

  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  void begin() override;
  void commit() override;
  void rollback() override;

  std::vector<DbPerson> find_by_name_keys(const std::vector<std::string>& keys) override;
  std::int64_t insert_person(const NewPerson& person) override;
  std::optional<DbPerson> get_person(std::int64_t id) override;
  void update_person(const DbPerson& person) override;
  void insert_relation(std::int64_t new_person_id, std::int64_t suspected_person_id) override;

  std::size_t education_count(std::int64_t person_id) override;
  std::size_t career_count(std::int64_t person_id) override;
  std::size_t particularity_count(std::int64_t person_id) override;

  void insert_education(std::int64_t person_id, const records::EducationEntry& e) override;
  void insert_career(std::int64_t person_id, const records::CareerEntry& c) override;
  void insert_particularity(std::int64_t person_id, const records::ParticularityEntry& p) override;

  std::size_t person_count() override;
  std::size_t relation_count() override;

 private:
  void exec(const std::string& sql);
  void index_person_names(std::int64_t id, const std::optional<std::string>& last_name,
                          const std::optional<std::string>& alternative_last_name);

  sqlite3* db_ = nullptr;
};

// The DDL applied by SqliteStore; identical to migrations/001_init.sql.
const char* schema_sql();

}  // namespace histrec::store
