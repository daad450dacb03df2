#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "esg/corpus.hpp"

namespace esg::test {

// Replays a fixed transcript of fetch outcomes.
class ScriptedAdapter final : public SourceAdapter {
 public:
  explicit ScriptedAdapter(std::vector<Fetch> script)
      : script_(std::move(script)) {}

  Fetch next(const std::string&) override {
    ++calls;
    if (at_ >= script_.size()) return {Status::exhausted, std::nullopt};
    return script_[at_++];
  }

  std::string name() const override { return "scripted"; }

  long calls = 0;

 private:
  std::vector<Fetch> script_;
  std::size_t at_ = 0;
};

inline Document make_doc(std::string id, std::string company,
                         Network network, std::string keyword,
                         std::string text) {
  Document doc;
  doc.id = std::move(id);
  doc.company = std::move(company);
  doc.network = network;
  doc.keyword = std::move(keyword);
  doc.text = std::move(text);
  return doc;
}

inline SourceAdapter::Fetch ok_fetch(Document doc) {
  return {SourceAdapter::Status::ok, std::move(doc)};
}

inline SourceAdapter::Fetch rate_limited_fetch() {
  return {SourceAdapter::Status::rate_limited, std::nullopt};
}

inline CompanyProfile apple_profile() {
  CompanyProfile profile;
  profile.canonical_name = "Apple";
  profile.aliases = {"Apple", "AAPL"};
  profile.ambiguous_aliases = {"Apple"};
  profile.sector = "technology";
  profile.blocklist_nouns = {"trees", "pie", "juice"};
  return profile;
}

inline CompanyProfile acme_profile() {
  CompanyProfile profile;
  profile.canonical_name = "Acme";
  profile.aliases = {"Acme"};
  profile.sector = "industrials";
  return profile;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static long counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("esg_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace esg::test
