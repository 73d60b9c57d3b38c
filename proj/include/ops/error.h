/*
 * Copyright 2026 The OPS Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OPS_ERROR_H_
#define OPS_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ops {

// Every abort condition in the protocol maps to exactly one code. The codes
// travel on the wire inside Rejected messages, so values are stable.
enum class ErrorCode : std::uint8_t {
  kOk = 0,
  // crypto / codec
  kBadKeyMaterial = 1,
  kUnencodable = 2,
  kMalformed = 3,
  kWrongKind = 4,
  kTrailingBytes = 5,
  // trusted application
  kAlreadyInitialized = 10,
  kNotInitialized = 11,
  kInvalidCertificate = 12,
  kCertificateNotMine = 13,
  kNotActivated = 14,
  kCounterOutOfSync = 15,
  kInvalidConfirmation = 16,
  kInsufficientOfflineFunds = 17,
  kInvalidAmount = 18,
  kBadReceiver = 19,
  kAlreadyCollected = 20,
  kNotAddressedToMe = 21,
  kInvalidPayment = 22,
  kRollbackDetected = 23,
  kTamperDetected = 24,
  kCounterOverflow = 25,
  kNothingToReissue = 26,
  kCrashed = 27,
  // server
  kAlreadyRegistered = 40,
  kUnknownOrProvisioned = 41,
  kAttestationRejected = 42,
  kInsufficientOnlineFunds = 43,
  kNoTaRegistered = 44,
  kUnauthenticated = 45,
  kMustBeCollected = 46,
  kAlreadyClaimed = 47,
  kUnknownReceiver = 48,
  kUnknownAccount = 49,
  kCorruptState = 50,
  kReplayedRequest = 51,
  kUnexpectedMessage = 52,
  // wallet
  kNoTa = 60,
  kBadServerCert = 61,
  kActivationFailed = 62,
  kWrongReceiver = 63,
  kAmountMismatch = 64,
  kReplayedPayment = 65,
  kNotRegistered = 66,
  kOffline = 67,
  kNoResponse = 68,
  kOperationPending = 69,
  // simulator
  kScript = 80,
};

// Canonical human-readable reason for a code, e.g. "counter out of sync".
std::string_view error_message(ErrorCode code);

// True iff value is one of the enumerators above.
bool is_known_error_code(std::uint8_t value);

class Error : public std::runtime_error {
 public:
  explicit Error(ErrorCode code)
      : std::runtime_error(std::string(error_message(code))), code_(code) {}
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_message(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ops

#endif  // OPS_ERROR_H_
