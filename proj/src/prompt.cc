//
// Copyright 2026 The WASP Synthesis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "wasp/prompt.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "yaml-cpp/yaml.h"

namespace wasp {
namespace {

constexpr char kLabelSlot[] = "{label}";
constexpr char kAttributeSlot[] = "{attribute}";
constexpr char kSampleSlot[] = "{sample}";

const std::vector<std::string>& YelpCategories() {
  static const auto* v = new std::vector<std::string>{
      "Arts & Entertainment",
      "Bars",
      "Beauty & Spas",
      "Event Planning & Services",
      "Grocery",
      "Health & Medical",
      "Home & Garden",
      "Hotels & Travel",
      "Restaurants",
      "Shopping"};
  return *v;
}

const std::vector<std::string>& YelpRatings() {
  static const auto* v =
      new std::vector<std::string>{"1.0", "2.0", "3.0", "4.0", "5.0"};
  return *v;
}

const std::vector<std::string>& OpenreviewAreas() {
  static const auto* v = new std::vector<std::string>{
      "Applications",
      "Deep Learning and representational learning",
      "General Machine Learning",
      "Generative models",
      "Machine Learning for Sciences",
      "Neuroscience and Cognitive Science",
      "Optimization",
      "Probabilistic Methods",
      "Reinforcement Learning",
      "Social Aspects of Machine Learning",
      "Theory",
      "Unsupervised and Self-supervised learning"};
  return *v;
}

const std::vector<std::string>& OpenreviewRecommendations() {
  static const auto* v = new std::vector<std::string>{
      "1: strong reject", "3: reject, not good enough",
      "5: marginally below the acceptance threshold",
      "6: marginally above the acceptance threshold", "8: accept, good paper"};
  return *v;
}

const std::vector<std::string>& BankingIntents() {
  static const auto* v = new std::vector<std::string>{
      "activate_my_card",
      "age_limit",
      "apple_pay_or_google_pay",
      "atm_support",
      "automatic_top_up",
      "balance_not_updated_after_bank_transfer",
      "balance_not_updated_after_cheque_or_cash_deposit",
      "beneficiary_not_allowed",
      "cancel_transfer",
      "card_about_to_expire"};
  return *v;
}

struct Wording {
  const char* task;
  const char* noun;
  const char* plural;
  // Describes the wanted text; carries {label} and possibly {attribute}.
  const char* subject;
};

PromptTemplate FromWording(const Wording& w) {
  std::string title = w.noun;
  title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
  PromptTemplate t;
  t.task = w.task;
  t.bad_example = absl::StrCat("Weak ", w.noun, ": {sample}\n");
  t.good_example = absl::StrCat("Strong ", w.noun, ": {sample}\n");
  t.plain_example = absl::StrCat("Example ", w.noun, ": {sample}\n");
  t.zero_shot = absl::StrCat("Write one ", w.noun, " ", w.subject, ".\n",
                             title, ": ");
  t.non_contrastive_instruction = absl::StrCat(
      "\nThe ", w.plural, " above are ", w.subject, ". Write one more ",
      w.noun, " ", w.subject,
      ", phrased differently from every example.\n", title, ": ");
  t.contrastive_instruction = absl::StrCat(
      "\nThe weak and strong ", w.plural, " above are all ", w.subject,
      ". First work out what separates the weak ones from the strong ones. "
      "Then write one new ",
      w.noun, " ", w.subject,
      " that improves on the strong examples by about as much as they improve "
      "on the weak ones, and word it differently from the strong examples.\n",
      title, ": ");
  return t;
}

constexpr Wording kWordings[] = {
    {"imdb", "movie review", "movie reviews", "with {label} sentiment"},
    {"yelp_category", "business review", "business reviews",
     "about a business in the {label} category, rated {attribute} stars"},
    {"yelp_rating", "business review", "business reviews",
     "rated {label} stars, about a business in the {attribute} category"},
    {"openreview_category", "paper review", "paper reviews",
     "for a paper in the {label} area with the final recommendation "
     "'{attribute}'"},
    {"openreview_rating", "paper review", "paper reviews",
     "for a paper in the {attribute} area with the final recommendation "
     "'{label}'"},
    {"banking", "online banking query", "online banking queries",
     "with the intent \"{label}\""},
};

absl::Status CheckSlots(std::string_view field, std::string_view text,
                        bool need_label, bool need_sample) {
  for (size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const size_t close = text.find('}', open);
    if (close == std::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("template field '", std::string(field), "' has an unclosed '{'"));
    }
    const std::string_view slot = text.substr(open, close - open + 1);
    if (slot != kLabelSlot && slot != kAttributeSlot && slot != kSampleSlot) {
      return absl::InvalidArgumentError(absl::StrCat(
          "template field '", std::string(field), "' uses unknown slot ", std::string(slot)));
    }
  }
  if (need_label && text.find(kLabelSlot) == std::string_view::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("template field '", std::string(field), "' is missing {label}"));
  }
  if (need_sample && text.find(kSampleSlot) == std::string_view::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("template field '", std::string(field), "' is missing {sample}"));
  }
  if (!need_sample && text.find(kSampleSlot) != std::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        "template field '", std::string(field), "' may not use {sample}"));
  }
  return absl::OkStatus();
}

// Single pass so that sample text containing "{label}" is left alone.
std::string Fill(std::string_view text, std::string_view label,
                 std::string_view attribute, std::string_view sample) {
  std::string out;
  out.reserve(text.size() + sample.size() + label.size());
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    const std::string_view rest = text.substr(open);
    if (rest.starts_with(kLabelSlot)) {
      out.append(label);
      pos = open + sizeof(kLabelSlot) - 1;
    } else if (rest.starts_with(kAttributeSlot)) {
      out.append(attribute);
      pos = open + sizeof(kAttributeSlot) - 1;
    } else if (rest.starts_with(kSampleSlot)) {
      out.append(sample);
      pos = open + sizeof(kSampleSlot) - 1;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  if (pos < text.size()) out.append(text.substr(pos));
  return out;
}

std::vector<std::string> Draw(const std::vector<SyntheticSample>& pool,
                              size_t k, Rng& rng) {
  std::vector<std::string> out;
  for (size_t i : rng.SampleWithoutReplacement(pool.size(), k)) {
    out.push_back(pool[i].sample.text);
  }
  return out;
}

}  // namespace

std::string_view PromptStyleName(PromptStyle style) {
  switch (style) {
    case PromptStyle::kZeroShot:
      return "zero_shot";
    case PromptStyle::kContrastive:
      return "contrastive";
    case PromptStyle::kNonContrastive:
      return "non_contrastive";
  }
  return "unknown";
}

absl::Status PromptTemplate::Validate() const {
  if (task.empty()) return absl::InvalidArgumentError("template has no task");
  const std::pair<std::string_view, const std::string*> instructions[] = {
      {"zero_shot", &zero_shot},
      {"contrastive_instruction", &contrastive_instruction},
      {"non_contrastive_instruction", &non_contrastive_instruction}};
  for (const auto& [name, text] : instructions) {
    if (absl::Status s = CheckSlots(name, *text, true, false); !s.ok()) {
      return s;
    }
  }
  const std::pair<std::string_view, const std::string*> examples[] = {
      {"bad_example", &bad_example},
      {"good_example", &good_example},
      {"plain_example", &plain_example}};
  for (const auto& [name, text] : examples) {
    if (absl::Status s = CheckSlots(name, *text, false, true); !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

bool PromptTemplate::UsesAttribute() const {
  for (const std::string* s :
       {&zero_shot, &bad_example, &good_example, &plain_example,
        &contrastive_instruction, &non_contrastive_instruction}) {
    if (s->find(kAttributeSlot) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> BuiltinTaskNames() {
  return {"imdb",          "yelp_category",       "yelp_rating",
          "openreview_category", "openreview_rating", "banking"};
}

absl::StatusOr<PromptTemplate> BuiltinTemplate(std::string_view task) {
  for (const Wording& w : kWordings) {
    if (task == w.task) return FromWording(w);
  }
  return absl::NotFoundError(
      absl::StrCat("no built-in template for task '", std::string(task), "'; known: ",
                   absl::StrJoin(BuiltinTaskNames(), ", ")));
}

absl::StatusOr<TaskDescriptor> BuiltinTask(std::string_view task) {
  TaskDescriptor d;
  d.name = std::string(task);
  if (task == "imdb") {
    d.categories = {"positive", "negative"};
  } else if (task == "yelp_category") {
    d.categories = YelpCategories();
    d.attributes = YelpRatings();
  } else if (task == "yelp_rating") {
    d.categories = YelpRatings();
    d.attributes = YelpCategories();
  } else if (task == "openreview_category") {
    d.categories = OpenreviewAreas();
    d.attributes = OpenreviewRecommendations();
  } else if (task == "openreview_rating") {
    d.categories = OpenreviewRecommendations();
    d.attributes = OpenreviewAreas();
  } else if (task == "banking") {
    d.categories = BankingIntents();
  } else {
    return absl::NotFoundError(
        absl::StrCat("no built-in task '", std::string(task), "'; known: ",
                     absl::StrJoin(BuiltinTaskNames(), ", ")));
  }
  return d;
}

absl::StatusOr<PromptTemplate> ParseTemplate(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("template is not valid YAML: ", e.what()));
  }
  if (!root.IsMap()) {
    return absl::InvalidArgumentError("template must be a YAML mapping");
  }
  PromptTemplate t;
  const std::pair<const char*, std::string*> fields[] = {
      {"task", &t.task},
      {"zero_shot", &t.zero_shot},
      {"bad_example", &t.bad_example},
      {"good_example", &t.good_example},
      {"plain_example", &t.plain_example},
      {"contrastive_instruction", &t.contrastive_instruction},
      {"non_contrastive_instruction", &t.non_contrastive_instruction}};
  for (const auto& [key, dest] : fields) {
    const YAML::Node node = root[key];
    if (!node || !node.IsScalar()) {
      return absl::InvalidArgumentError(
          absl::StrCat("template is missing string field '", key, "'"));
    }
    *dest = node.as<std::string>();
  }
  if (absl::Status s = t.Validate(); !s.ok()) return s;
  return t;
}

absl::StatusOr<PromptTemplate> LoadTemplate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open template ", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  absl::StatusOr<PromptTemplate> t = ParseTemplate(buf.str());
  if (!t.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", t.status().message()));
  }
  return t;
}

uint64_t TemplateHash(const PromptTemplate& tmpl, PromptStyle style) {
  uint64_t h = Fnv1a(PromptStyleName(style));
  auto mix = [&h](const std::string& s) {
    h = Fnv1a(s, h);
    h = Fnv1a(std::string_view("\0", 1), h);
  };
  switch (style) {
    case PromptStyle::kZeroShot:
      mix(tmpl.zero_shot);
      break;
    case PromptStyle::kContrastive:
      mix(tmpl.bad_example);
      mix(tmpl.good_example);
      mix(tmpl.contrastive_instruction);
      break;
    case PromptStyle::kNonContrastive:
      mix(tmpl.plain_example);
      mix(tmpl.non_contrastive_instruction);
      break;
  }
  return h;
}

absl::StatusOr<Prompt> BuildPrompt(const PromptTemplate& tmpl, PromptStyle style,
                                   const PromptRequest& request,
                                   const ContrastiveSelection* selection,
                                   Rng& rng) {
  if (tmpl.UsesAttribute() && !request.attribute.has_value()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "template for task '", tmpl.task, "' needs an attribute"));
  }
  Prompt p;
  p.label = request.label;
  p.attribute = request.attribute;
  const std::string attribute = request.attribute.value_or("");
  if (selection == nullptr || style == PromptStyle::kZeroShot) {
    p.style = PromptStyle::kZeroShot;
    p.text = Fill(tmpl.zero_shot, request.label, attribute, "");
    return p;
  }
  const int c = request.category;
  if (c < 0 || c >= static_cast<int>(selection->near.size()) ||
      c >= static_cast<int>(selection->far.size())) {
    return absl::InvalidArgumentError(
        absl::StrCat("selection has no category ", c));
  }
  const auto& near = selection->near[c];
  const auto& far = selection->far[c];
  if (near.empty() || far.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "selection for '", request.label, "' has no in-context samples"));
  }
  const size_t s = static_cast<size_t>(selection->s);
  p.style = style;
  if (style == PromptStyle::kContrastive) {
    p.bad = Draw(far, s / 2, rng);
    p.good = Draw(near, s - s / 2, rng);
    for (const auto& x : p.bad) {
      p.text += Fill(tmpl.bad_example, request.label, attribute, x);
    }
    for (const auto& x : p.good) {
      p.text += Fill(tmpl.good_example, request.label, attribute, x);
    }
    p.text +=
        Fill(tmpl.contrastive_instruction, request.label, attribute, "");
  } else {
    p.good = Draw(near, s, rng);
    for (const auto& x : p.good) {
      p.text += Fill(tmpl.plain_example, request.label, attribute, x);
    }
    p.text +=
        Fill(tmpl.non_contrastive_instruction, request.label, attribute, "");
  }
  return p;
}

}  // namespace wasp
