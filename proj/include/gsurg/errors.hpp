//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <stdexcept>
#include <string>

namespace gsurg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong tensor dtype for an operation.
class DTypeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the operation's domain (bad range, empty list, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Shape/dtype inference failure; message names the offending node.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Feed map does not match the graph's input signature.
class FeedError : public Error {
 public:
  using Error::Error;
};

// A rewrite was requested on a site it does not apply to.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

// Two graphs cannot be compared (signature mismatch not covered by a mapping).
class VerificationError : public Error {
 public:
  using Error::Error;
};

// Malformed input document; message carries file/field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsurg
