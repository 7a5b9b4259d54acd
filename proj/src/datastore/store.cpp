#include "martsia/datastore/store.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "martsia/crypto/sha256.hpp"
#include "martsia/error.hpp"

namespace martsia::datastore {
namespace {

void check_rloc(const Rloc& rloc) {
  if (!is_rloc(rloc)) throw Error(ErrorCode::Malformed, "not a resource locator: " + rloc);
}

[[noreturn]] void not_found(const Rloc& rloc) {
  throw Error(ErrorCode::NotFound, "no object stored under " + rloc);
}

Bytes verified(const Rloc& rloc, Bytes content) {
  if (rloc_of(content) != rloc) {
    throw Error(ErrorCode::IntegrityFailure, "stored object " + rloc + " fails its digest check");
  }
  return content;
}

void check_content(ByteView content) {
  if (content.empty()) throw Error(ErrorCode::InvalidArgument, "refusing to store empty content");
}

}  // namespace

Rloc rloc_of(ByteView content) { return crypto::sha256_hex(content); }

bool is_rloc(std::string_view text) {
  return text.size() == 64 && std::all_of(text.begin(), text.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

Rloc MemoryStore::put(ByteView content) {
  check_content(content);
  Rloc rloc = rloc_of(content);
  std::lock_guard lock(mu_);
  objects_.try_emplace(rloc, content.begin(), content.end());
  return rloc;
}

Bytes MemoryStore::get(const Rloc& rloc) const {
  check_rloc(rloc);
  std::lock_guard lock(mu_);
  const auto it = objects_.find(rloc);
  if (it == objects_.end()) not_found(rloc);
  return verified(rloc, it->second);
}

bool MemoryStore::contains(const Rloc& rloc) const {
  std::lock_guard lock(mu_);
  return objects_.contains(rloc);
}

std::vector<Rloc> MemoryStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<Rloc> out;
  for (const auto& [k, v] : objects_) out.push_back(k);
  return out;
}

void MemoryStore::tamper(const Rloc& rloc, std::size_t offset, std::uint8_t mask) {
  std::lock_guard lock(mu_);
  const auto it = objects_.find(rloc);
  if (it == objects_.end()) not_found(rloc);
  it->second.at(offset) ^= mask;
}

DirectoryStore::DirectoryStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path DirectoryStore::path_of(const Rloc& rloc) const {
  check_rloc(rloc);
  return root_ / rloc;
}

Rloc DirectoryStore::put(ByteView content) {
  check_content(content);
  Rloc rloc = rloc_of(content);
  const auto path = path_of(rloc);
  std::lock_guard lock(mu_);
  if (std::filesystem::exists(path)) return rloc;
  // write-then-rename keeps a crashed put from leaving a truncated object
  const auto tmp = root_ / (rloc + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(content.data()),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IntegrityFailure, "failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return rloc;
}

Bytes DirectoryStore::get(const Rloc& rloc) const {
  const auto path = path_of(rloc);
  std::lock_guard lock(mu_);
  std::ifstream in(path, std::ios::binary);
  if (!in) not_found(rloc);
  Bytes content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return verified(rloc, std::move(content));
}

bool DirectoryStore::contains(const Rloc& rloc) const {
  return is_rloc(rloc) && std::filesystem::exists(root_ / rloc);
}

std::vector<Rloc> DirectoryStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<Rloc> out;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && is_rloc(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void DirectoryStore::tamper(const Rloc& rloc, std::size_t offset, std::uint8_t mask) {
  const auto path = path_of(rloc);
  std::lock_guard lock(mu_);
  std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!f) not_found(rloc);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  if (!f.get(c)) throw Error(ErrorCode::InvalidArgument, "tamper offset past end of object");
  f.seekp(static_cast<std::streamoff>(offset));
  f.put(static_cast<char>(c ^ static_cast<char>(mask)));
}

}  // namespace martsia::datastore
