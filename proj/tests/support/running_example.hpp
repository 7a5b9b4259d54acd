#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "martsia/envelope/envelope.hpp"
#include "support/world.hpp"

namespace martsia::testing::running_example {

inline constexpr const char* kCaseId = "43175279";

struct Reader {
  std::string label;
  std::set<std::string> attributes;
  bool owner;
};

inline const std::vector<Reader>& readers() {
  static const std::vector<Reader> r = {
      {"manufacturer", {"Manufacturer", "43175279"}, true},
      {"international-supplier", {"Supplier", "International", "43175279"}, true},
      {"national-supplier", {"Supplier", "National", "43175279"}, false},
      {"national-customs", {"Customs"}, true},
      {"international-customs", {"Customs"}, false},
      {"international-carrier", {"Carrier", "International", "43175279"}, false},
  };
  return r;
}

struct Message {
  std::string name;
  std::string sender;
  std::vector<std::string> slice_names;
  std::vector<envelope::SlicePlan> plans;
};

inline const std::vector<Message>& messages() {
  static const std::vector<Message> m = {
      {"purchase-order",
       "manufacturer",
       {"order"},
       {{"43175279@2+ and (Manufacturer@1+ or (Supplier@1+ and International@1+))",
         {{"item", "Wheelchair ramp WR-220"}, {"quantity", "150"}, {"unit_price", "EUR 412.00"},
          {"delivery_terms", "FCA Rotterdam"}}}}},
      {"export-document",
       "international-supplier",
       {"shipment-order", "csdd", "order-reference", "invoice"},
       {{"Customs@A or (43175279@2+ and ((Supplier@1+ and International@1+) or Manufacturer@1+ or "
         "(Carrier@1+ and International@1+)))",
         {{"consignee", "Ramp Works GmbH"}, {"loading_port", "Shanghai"}, {"vessel", "MV Northern Lark"},
          {"container", "MSKU4417392"}, {"gross_weight_kg", "18240"}}},
        {"Customs@A or (43175279@2+ and (Supplier@1+ and International@1+))",
         {{"exporter_id", "CN4401987765"}, {"hs_code", "8428.90"}, {"declared_value", "USD 67350.00"},
          {"origin", "CN"}}},
        {"43175279@2+ and ((Supplier@2+ and International@1+) or Manufacturer@1+)",
         {{"order_reference", "PO-43175279-07"}}},
        {"Customs@A or (43175279@2+ and ((Supplier@1+ and International@1+) or Manufacturer@1+))",
         {{"invoice_number", "INV-88213"}, {"amount", "USD 67350.00"}, {"due_date", "2024-07-30"}}}}},
      {"customs-clearance",
       "national-customs",
       {"clearance"},
       {{"Customs@A or (43175279@2+ and Manufacturer@1+)",
         {{"clearance_number", "CLR-2024-55810"}, {"status", "released"}, {"duties_paid", "EUR 1684.00"}}}}},
  };
  return m;
}

/// Intended recipients per slice, plus the sender of each message.
inline std::map<std::string, std::set<std::string>> expected_access() {
  return {
      {"purchase-order/order", {"international-supplier", "manufacturer"}},
      {"export-document/shipment-order",
       {"manufacturer", "national-customs", "international-customs", "international-carrier",
        "international-supplier"}},
      {"export-document/csdd", {"national-customs", "international-customs", "international-supplier"}},
      {"export-document/order-reference", {"manufacturer", "international-supplier"}},
      {"export-document/invoice",
       {"manufacturer", "national-customs", "international-customs", "international-supplier"}},
      {"customs-clearance/clearance", {"manufacturer", "international-customs", "national-customs"}},
  };
}

inline void populate(World& w) {
  for (const auto& r : readers()) {
    std::vector<Role> roles{Role::Reader};
    if (r.owner) roles.push_back(Role::DataOwner);
    w.add(r.label, r.attributes, roles);
  }
}

}  // namespace martsia::testing::running_example
