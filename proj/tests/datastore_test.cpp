#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

#include "doctest.h"
#include "martsia/datastore/store.hpp"
#include "martsia/error.hpp"

using namespace martsia;
using namespace martsia::datastore;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("martsia-store-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
            "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void exercise(ContentStore& store) {
  const Bytes x = to_bytes("metadata file contents");
  const Rloc a = store.put(x);
  CHECK(store.put(x) == a);
  CHECK(is_rloc(a));
  CHECK(a == rloc_of(x));
  CHECK(store.get(a) == x);
  CHECK(store.contains(a));
  CHECK(store.list() == std::vector<Rloc>{a});

  CHECK(code_of([&] { store.put({}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { store.get(std::string(64, '0')); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { store.get("not-an-rloc"); }) == ErrorCode::Malformed);

  store.tamper(a, 3, 0x20);
  CHECK(code_of([&] { store.get(a); }) == ErrorCode::IntegrityFailure);
}

}  // namespace

TEST_CASE("sha-256 locators") {
  CHECK(rloc_of(as_bytes("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_FALSE(is_rloc("BA7816BF8F01CFEA414140DE5DAE2223B00361A396177A9CB410FF61F20015AD"));
}

TEST_CASE("memory store") {
  MemoryStore store;
  exercise(store);
}

TEST_CASE("directory store") {
  TempDir dir;
  {
    DirectoryStore store(dir.path);
    exercise(store);
  }
  DirectoryStore reopened(dir.path);
  const Rloc b = reopened.put(as_bytes("persisted"));
  DirectoryStore again(dir.path);
  CHECK(to_string(again.get(b)) == "persisted");

  // corrupt the backing file directly
  {
    std::ofstream out(dir.path / b, std::ios::binary | std::ios::trunc);
    out << "persisteD";
  }
  CHECK(code_of([&] { again.get(b); }) == ErrorCode::IntegrityFailure);
}

TEST_CASE("identical content from independent writers shares a locator") {
  MemoryStore store;
  std::vector<std::thread> writers;
  std::vector<Rloc> out(8);
  for (int i = 0; i < 8; ++i) {
    writers.emplace_back([&, i] { out[i] = store.put(as_bytes("authority metadata v1")); });
  }
  for (auto& t : writers) t.join();
  for (const auto& r : out) CHECK(r == out.front());
  CHECK(store.list().size() == 1);
}
