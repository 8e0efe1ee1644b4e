#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>

namespace sstune {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data. The CLI maps this to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The negative pool cannot supply the requested number of options.
class InsufficientPool : public DataError {
 public:
  using DataError::DataError;
};

/// Evaluation over an empty record stream.
class EmptyEval : public DataError {
 public:
  using DataError::DataError;
};

/// Identifies one paragraph of one article.
struct SourceId {
  std::string article_id;
  std::size_t paragraph_index = 0;

  friend bool operator==(const SourceId&, const SourceId&) = default;
  friend auto operator<=>(const SourceId& a, const SourceId& b) {
    return std::tie(a.article_id, a.paragraph_index) <=>
           std::tie(b.article_id, b.paragraph_index);
  }
};

/// A recoverable, record-level problem in an input file.
struct RecordError {
  std::string path;
  std::size_t line = 0;
  std::string message;
};

}  // namespace sstune
