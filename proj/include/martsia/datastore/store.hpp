#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "martsia/bytes.hpp"

namespace martsia::datastore {

/// Lowercase hex SHA-256 of the stored bytes.
using Rloc = std::string;

Rloc rloc_of(ByteView content);
bool is_rloc(std::string_view text);

/// Content-addressed blob store. Implementations are safe for concurrent
/// use; puts are idempotent.
class ContentStore {
 public:
  virtual ~ContentStore() = default;

  /// Throws InvalidArgument for empty content.
  virtual Rloc put(ByteView content) = 0;
  /// Throws NotFound for unknown locators and IntegrityFailure when the
  /// stored bytes no longer hash to `rloc`.
  virtual Bytes get(const Rloc& rloc) const = 0;
  virtual bool contains(const Rloc& rloc) const = 0;
  virtual std::vector<Rloc> list() const = 0;

  /// Fault injection: xor one stored byte in place, bypassing addressing.
  virtual void tamper(const Rloc& rloc, std::size_t offset, std::uint8_t mask) = 0;
};

class MemoryStore final : public ContentStore {
 public:
  Rloc put(ByteView content) override;
  Bytes get(const Rloc& rloc) const override;
  bool contains(const Rloc& rloc) const override;
  std::vector<Rloc> list() const override;
  void tamper(const Rloc& rloc, std::size_t offset, std::uint8_t mask) override;

 private:
  mutable std::mutex mu_;
  std::map<Rloc, Bytes> objects_;
};

/// One file per object, named by its locator, under `root`.
class DirectoryStore final : public ContentStore {
 public:
  explicit DirectoryStore(std::filesystem::path root);

  Rloc put(ByteView content) override;
  Bytes get(const Rloc& rloc) const override;
  bool contains(const Rloc& rloc) const override;
  std::vector<Rloc> list() const override;
  void tamper(const Rloc& rloc, std::size_t offset, std::uint8_t mask) override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_of(const Rloc& rloc) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

}  // namespace martsia::datastore
