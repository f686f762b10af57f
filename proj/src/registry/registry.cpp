/*
 * Copyright 2026 The Fwchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fwchain/registry.hpp"

#include <algorithm>
#include <sstream>

#include "fwchain/codec.hpp"
#include "fwchain/kernels/sha256.hpp"

namespace fwchain::registry {

namespace {

constexpr std::uint8_t kTagDeploy = 0x01;
constexpr std::uint8_t kTagPropose = 0x02;
constexpr std::uint8_t kTagConfirm = 0x03;
constexpr std::uint8_t kTagPublish = 0x10;

Result<void> check_tag(const std::string& s, const char* what) {
  if (s.empty()) return err(Errc::malformed_record, std::string(what) + " is empty");
  if (s.size() > kMaxTagLen) return err(Errc::malformed_record, std::string(what) + " too long");
  return {};
}

}  // namespace

Bytes FirmwareRecord::canonical() const {
  Encoder e;
  e.put_string(product_id)
      .put_u64(version)
      .put_digest(content_id)
      .put_digest(firmware_digest)
      .put_string(target_model);
  return e.take();
}

Result<FirmwareRecord> FirmwareRecord::decode(ByteView data) {
  Decoder d(data);
  FirmwareRecord r;
  auto product = d.string_field();
  if (!product) return product.error();
  r.product_id = product.take();
  auto version = d.u64_field();
  if (!version) return version.error();
  r.version = version.value();
  auto cid = d.digest_field();
  if (!cid) return cid.error();
  r.content_id = cid.value();
  auto fd = d.digest_field();
  if (!fd) return fd.error();
  r.firmware_digest = fd.value();
  auto model = d.string_field();
  if (!model) return model.error();
  r.target_model = model.take();
  if (!d.done()) return err(Errc::parse_error, "trailing bytes after record");
  return r;
}

std::string FirmwareRecord::to_json() const {
  std::ostringstream os;
  os << "{\"product_id\":\"" << product_id << "\",\"version\":" << version
     << ",\"content_id\":\"" << to_hex(as_view(content_id)) << "\",\"firmware_digest\":\""
     << to_hex(as_view(firmware_digest)) << "\",\"target_model\":\"" << target_model << "\"}";
  return os.str();
}

Result<void> validate_record(const FirmwareRecord& r) {
  if (auto c = check_tag(r.product_id, "product_id"); !c) return c;
  if (auto c = check_tag(r.target_model, "target_model"); !c) return c;
  if (r.version == 0) return err(Errc::malformed_record, "version must be > 0");
  if (is_zero(r.content_id)) return err(Errc::malformed_record, "content_id is zero");
  if (is_zero(r.firmware_digest)) return err(Errc::malformed_record, "firmware_digest is zero");
  return {};
}

bool OwnerSet::is_owner(const Address& a) const {
  return std::find(owners.begin(), owners.end(), a) != owners.end();
}

Result<void> OwnerSet::validate() const {
  if (owners.empty()) return err(Errc::parse_error, "owner set is empty");
  if (threshold < 1 || threshold > owners.size())
    return err(Errc::parse_error, "threshold out of range");
  for (std::size_t i = 0; i < owners.size(); ++i)
    for (std::size_t j = i + 1; j < owners.size(); ++j)
      if (owners[i] == owners[j]) return err(Errc::parse_error, "duplicate owner");
  return {};
}

Bytes OwnerSet::canonical() const {
  Encoder e;
  e.put_digest(root_commitment);
  e.put_u32(static_cast<std::uint32_t>(owners.size()));
  for (const auto& o : owners) e.put_bytes(o.view());
  e.put_u32(threshold);
  return e.take();
}

Result<OwnerSet> OwnerSet::decode(ByteView data) {
  Decoder d(data);
  OwnerSet s;
  auto rc = d.digest_field();
  if (!rc) return rc.error();
  s.root_commitment = rc.value();
  auto count = d.u32_field();
  if (!count) return count.error();
  for (std::uint32_t i = 0; i < count.value(); ++i) {
    auto a = d.bytes_field();
    if (!a) return a.error();
    if (a.value().size() != 20) return err(Errc::parse_error, "address not 20 bytes");
    Address addr;
    std::copy(a.value().begin(), a.value().end(), addr.bytes.begin());
    s.owners.push_back(addr);
  }
  auto thr = d.u32_field();
  if (!thr) return thr.error();
  s.threshold = thr.value();
  if (!d.done()) return err(Errc::parse_error, "trailing bytes after owner set");
  return s;
}

bool Proposal::confirmed_by(const Address& a) const {
  return std::find(confirmations.begin(), confirmations.end(), a) != confirmations.end();
}

Bytes encode_action(const Action& a) {
  Encoder e;
  if (const auto* dep = std::get_if<DeployAction>(&a)) {
    e.put_u8(kTagDeploy).put_bytes(as_view(dep->owner_set.canonical()));
  } else if (const auto* prop = std::get_if<ProposeAction>(&a)) {
    e.put_u8(kTagPropose).put_bytes(as_view(prop->inner));
  } else if (const auto* conf = std::get_if<ConfirmAction>(&a)) {
    e.put_u8(kTagConfirm).put_u64(conf->proposal_id);
  } else {
    const auto& pub = std::get<PublishAction>(a);
    e.put_u8(kTagPublish).put_bytes(as_view(pub.record.canonical()));
  }
  return e.take();
}

Result<Action> decode_action(ByteView data) {
  Decoder d(data);
  auto tag = d.u8_field();
  if (!tag) return err(Errc::unknown_call, "action tag unreadable");
  switch (tag.value()) {
    case kTagDeploy: {
      auto body = d.bytes_field();
      if (!body) return body.error();
      auto set = OwnerSet::decode(body.value());
      if (!set) return set.error();
      return Action(DeployAction{set.take()});
    }
    case kTagPropose: {
      auto body = d.bytes_field();
      if (!body) return body.error();
      return Action(ProposeAction{to_bytes(body.value())});
    }
    case kTagConfirm: {
      auto id = d.u64_field();
      if (!id) return id.error();
      return Action(ConfirmAction{id.value()});
    }
    case kTagPublish: {
      auto body = d.bytes_field();
      if (!body) return body.error();
      auto rec = FirmwareRecord::decode(body.value());
      if (!rec) return rec.error();
      return Action(PublishAction{rec.take()});
    }
    default:
      return err(Errc::unknown_call, "unknown action tag");
  }
}

Bytes make_publish_inner(const FirmwareRecord& r) {
  return encode_action(Action(PublishAction{r}));
}

namespace {

Result<FirmwareRecord> execute_publish(RegistryState& st, const FirmwareRecord& record) {
  if (auto v = validate_record(record); !v) return v.error();
  auto& history = st.records[record.product_id];
  if (!history.empty() && record.version <= history.back().version) {
    return err(Errc::version_not_monotonic,
               "version " + std::to_string(record.version) + " not above latest " +
                   std::to_string(history.back().version));
  }
  history.push_back(record);
  return record;
}

// Threshold check shared by propose and confirm. Execution is attempted at
// most once; a failed inner action fails the whole transaction, which the
// ledger then discards wholesale.
Result<ApplyOutcome> maybe_execute(RegistryState& st, Proposal& p, ApplyOutcome outcome) {
  if (p.executed || p.confirmations.size() < st.owner_set.threshold) {
    outcome.note = p.executed ? "already executed" : "pending confirmations";
    return outcome;
  }
  auto inner = decode_action(as_view(p.action));
  if (!inner) return inner.error();
  const auto* pub = std::get_if<PublishAction>(&inner.value());
  if (!pub) return err(Errc::unauthorized, "proposal carries a non-publish action");
  auto published = execute_publish(st, pub->record);
  if (!published) return published.error();
  p.executed = true;
  outcome.published = published.take();
  outcome.note = "executed";
  return outcome;
}

}  // namespace

Result<ApplyOutcome> RegistryState::apply(const Address& sender, ByteView action_bytes) {
  auto action = decode_action(action_bytes);
  if (!action) return action.error();

  if (const auto* dep = std::get_if<DeployAction>(&action.value())) {
    if (deployed) return err(Errc::already_deployed, "owner set already deployed");
    if (auto v = dep->owner_set.validate(); !v) return v.error();
    deployed = true;
    owner_set = dep->owner_set;
    ApplyOutcome o;
    o.note = "deployed owner set";
    return o;
  }

  if (!deployed) return err(Errc::not_deployed, "registry has no owner set yet");

  if (const auto* prop = std::get_if<ProposeAction>(&action.value())) {
    if (!owner_set.is_owner(sender)) return err(Errc::not_owner, sender.hex());
    // The inner action must at least decode as a publish before a proposal
    // is admitted.
    auto inner = decode_action(as_view(prop->inner));
    if (!inner) return inner.error();
    if (!std::holds_alternative<PublishAction>(inner.value()))
      return err(Errc::unauthorized, "only publish actions can be proposed");

    Proposal p;
    p.id = next_proposal_id++;
    p.action = prop->inner;
    p.confirmations.push_back(sender);
    ApplyOutcome o;
    o.proposal_id = p.id;
    auto res = maybe_execute(*this, p, std::move(o));
    if (!res) return res.error();
    proposals[p.id] = std::move(p);
    return res;
  }

  if (const auto* conf = std::get_if<ConfirmAction>(&action.value())) {
    if (!owner_set.is_owner(sender)) return err(Errc::not_owner, sender.hex());
    auto it = proposals.find(conf->proposal_id);
    if (it == proposals.end())
      return err(Errc::unknown_proposal, std::to_string(conf->proposal_id));
    Proposal& p = it->second;
    if (p.executed) return err(Errc::already_executed, std::to_string(p.id));
    if (!p.confirmed_by(sender)) p.confirmations.push_back(sender);  // idempotent
    ApplyOutcome o;
    o.proposal_id = p.id;
    return maybe_execute(*this, p, std::move(o));
  }

  // Direct publish bypasses the wallet.
  return err(Errc::unauthorized, "publish must go through a multisig proposal");
}

Result<FirmwareRecord> RegistryState::get_latest(const std::string& product) const {
  auto it = records.find(product);
  if (it == records.end() || it->second.empty())
    return err(Errc::not_found, "no records for " + product);
  return it->second.back();
}

Result<FirmwareRecord> RegistryState::get_version(const std::string& product,
                                                  std::uint64_t version) const {
  auto it = records.find(product);
  if (it == records.end()) return err(Errc::not_found, "no records for " + product);
  for (const auto& r : it->second)
    if (r.version == version) return r;
  return err(Errc::not_found, product + " has no version " + std::to_string(version));
}

Result<std::vector<FirmwareRecord>> RegistryState::history(const std::string& product) const {
  auto it = records.find(product);
  if (it == records.end() || it->second.empty())
    return err(Errc::not_found, "no records for " + product);
  return it->second;
}

Result<Proposal> RegistryState::proposal(std::uint64_t id) const {
  auto it = proposals.find(id);
  if (it == proposals.end()) return err(Errc::unknown_proposal, std::to_string(id));
  return it->second;
}

}  // namespace fwchain::registry

namespace fwchain::multisig {

OwnerKey derive_owner(const Digest32& root_seed, std::uint32_t index) {
  Bytes material(root_seed.begin(), root_seed.end());
  std::uint8_t idx[4];
  put_be32(idx, index);
  material.insert(material.end(), idx, idx + 4);

  OwnerKey k;
  k.index = index;
  k.keys = crypto::keypair_from_seed(crypto::default_curve(), kernels::sha256(as_view(material)));
  k.address = Address::from_public_key(k.keys.pub);
  return k;
}

registry::OwnerSet make_owner_set(const Digest32& root_seed, std::uint32_t count,
                                  std::uint32_t threshold) {
  registry::OwnerSet set;
  set.root_commitment = kernels::sha256(as_view(root_seed));
  for (std::uint32_t i = 0; i < count; ++i) set.owners.push_back(derive_owner(root_seed, i).address);
  set.threshold = threshold;
  return set;
}

}  // namespace fwchain::multisig
