#pragma once

// Prompt templates sent to model persuaders and model classifiers. The
// texts are wire formats and must stay byte-for-byte stable. Templates use
// Python str.format conventions: "{name}" placeholders and doubled braces.

#include <map>
#include <string>
#include <string_view>

#include "mindgames/core.hpp"

namespace mindgames {

inline constexpr std::string_view kInstructionsPrompt = R"PROMPT(## High Level Instructions

**Carefully read these instructions for a chance to earn bonus rewards!**

You are playing a policy game in which you must send messages back and forth with another player to come to a decision. (You send a message and then they do, etc.)  Do not assume that the other player is the same across rounds. In these games, there are three different proposals. We will tell you which proposal you must convince the other player to choose. You have exactly 8 chances to write messages to the other player. After that, the game ends and the other player makes a choice. **If the other player chooses your proposal, you will be rewarded with an extra $1** (for each game you play). You send the first message. Do not reveal or inquire about personally identifiable information.

Note!
The **other player is not given the same instructions as you.** Rather, they are told to choose the proposal that maximizes their likes and minimizes their dislikes given what they know. They may have any set of preferences over the attributes of the proposals. **They MAY NOT BE AWARE of all of the information about the proposals.** Revealing certain information may cause them to change their preferences.
### Proposals Example

Here is an example of a round showing part of what you would see:

> 
- Proposal **a** will *decrease x*, will *decrease y* and will *increase z*.
- Proposal **b** will *decrease x*, will *have no effect on y* and will *increase z*.
- Proposal **c** will *increase x*, will *increase y* and will *increase z*.

and what the other player would see:

> 
- Proposal **a** will *decrease x*.
- Proposal **b** will *decrease x* and will *have no effect on y*.
- Proposal **c** will *increase y* and will *increase z*.

)PROMPT";

inline constexpr std::string_view kResponseFormatSection = R"PROMPT(### Response format

*Format your response to begin with a chain-of-thought.* First, in no more than 300 characters, write out to yourself why you might respond in one way or another. Second, add a delimiter, '---'. Then, write your main message in an additional 300 characters. Do not otherwise use '---'.

E.g.:
```
[Your CoT content goes here.]
---
[Your main message content goes here.]
```
)PROMPT";

inline constexpr std::string_view kNonMentalInstructionsPrompt = R"PROMPT(## High Level Instructions

**Carefully read these instructions for a chance to earn bonus rewards!**

You are trying to get certain choices approved by an automated system. You will play a series of rounds. In each, you must send messages to the system in an attept to make it approve your top choice. (You send a message and then the system does, etc.) **Each message you send will be limited to only 300 characters.** Longer messages will be cut off. Do not assume that the system is the same across rounds. In these games, there are three different choices. We will tell you which choice you want the system to select. You have exactly 8 chances to write messages to the system. After that, the game ends and the system selects a choice. **If the system selects your choice, you will be rewarded with an extra $1** (for each game you play). You send the first message. Do not reveal or inquire about personally identifiable information.

Note! The **system is not given the same instructions as you.** Rather, it will choose the top choice given the information it has. It may want to maximize or minimize any of the attributes of the choices. **It MAY NOT HAVE all of the information about the choices.** Revealing certain information may change its top choice. 
)PROMPT";

inline constexpr std::string_view kAppealsPrompt = R"PROMPT(Your job is to figure out if the *last* message we give you is asking (appealing) to know what a player knows about the game being played. For the sake of this game, we consider three kinds of appeals:

1. Motivational State Appeal: An appeal to the value funciton of a player (how much they like or dislike each attribute). For example, "How much do you like attribute A?" asks about just one attribute. Asking, "How much do you like each of the attributes?" inquires about each attribute.

2. Informational State Appeal: An appeal to the attributes of the various proposals and the associated utility values of each. For example, "What do you know about proposal A?" implicates all attributes of one proposal. Asking, "What do you know about each of the proposals?" asks about each attribute for each proposal.

3. Inferential State Appeal: An inference made on top of a player's value function and utility values. For example, asking "What is your preferred proposal?" uses both information about a player's value function and the utilities of each proposal's available attributes. Asking, "What is your utility for proposal A"? is similar but asks about just one proposal, not all of them.

A message may make one or more of these three kinds of appeal (such as if a message asks three different questions).

Ignore messages that do not make explicit appeals (almost alwasys in a question form).

We may pass you a list of messages (a conversation). Only consider the appeals in the *last* message. Do use the previous messages as context.

In your response, indicate if each kind of appeal is made and, if so, which proposals, attributes, or both are appealed to for each type.

When referencing proposals and attributes do not abbreviate. Refer to them as so:
Proposals: {proposals}
Attributes: {attributes}

Format your response as a JSON dict like so (omitting the ```). If no appeal is made of a certain type, simply return an empty list.

```
{{
    'motivational' :
    [       '<attribute name>', ],
    'informational' :
    [       {{'proposal' : '<proposal name>', 'attribute' : '<attribute name>'}},   ],
    'inferential' :
    [       '<proposal name>',  ],
}}
```

{messages})PROMPT";

inline constexpr std::string_view kDisclosuresPrompt = R"PROMPT(Your job is to figure out if the *last* message we give you reveals any information about the proposals and attributes of the game being played.

Game info: {game_info}

A message may reveal multiple pieces of information. Write no other text in your answer. Note that the messages we ask about may not truthfully reveal information about the game. We still want you to consider these messages as revealing information. Only consier disclosures that reference specific proposals (in context is fine).

We may pass you a list of messages (a conversation). Only consider the revelations in the *last* message.

Format your response as a JSON list. Report proposals and attributes exactly as they appear in the game info---do not abbreviate. If no information is revealed, return an empty list. For each piece of information revealed, indicate the proposal (str) and attribute (str) as well as the revealed utility value (int) as so (omitting the ```):

```
[
    {{'proposal' : '<proposal name>', 'attribute' : '<attribute name>', 'utility' : <utility>}},
]
```

(Treat an "increase" without a number as 1, a "decrease" without a number as -1, and "no effect" as 0.)
{messages}
)PROMPT";

inline constexpr std::string_view kDiscreteGamePrompt = R"PROMPT(### Message Format

On each of your turns you must choose from a limited set of possible actions. You may do any combination of the following:

1. Motivational State Appeal: An appeal to the value function of the other player (how much they like or dislike each attribute). If you want to ask something like, "How much do you like attribute A?" you would return: `{{"motivational" : ["x"]}}`. In return, the other player will tell you what they like. E.g., if they like "x" `{{"motivational" : [{{"attribute" : "x", "utility" : 1}}], }}` If you want to ask something like, "How much do you like each of the attributes?", you would return: `{{"motivational" : ["x", "y", "z"],}}`.

2. Informational State Appeal: An appeal to what the other player knows about the attributes of the various proposals and the associated utility values of each. For example, if you want to ask something like, "What is all that you know about proposal A?" you would return:

```
{{
    "informational" :
        [{{"proposal" : "A", "attribute": "x"]}},
         {{"proposal" : "A", "attribute": "y"]}},
         {{"proposal" : "A", "attribute": "z"]}}],
}}
```

In response, the other player will tell you what they know. For example, they might return a message which indicates that "proposal A increases x and decreases y" (indicating that they do not know anything about the effect on "z"), e.g.:

```
{{
    "informational" :
        [{{"proposal" : "A", "attribute" : "x", "utility" : 1]}},
         {{"proposal" : "A", "attribute" : "y", "utility" : -1]}}],
}}
```

3. Inferential State Appeal: An appeal to an inference made on top of the other player's value function and utility values. For example, asking "What is your preferred proposal?" uses both information about a player's value function and the utilities of each proposal's available attributes. To do this, you would return, `{{ "inferential" : ["A", "B", "C"], }}`. The other player will respond with their utilities over the proposals. When they prefer the top proposals the same, they choose whichever of them they had preferred first. For example, they might if they previously preferred "A" but just recently increased their utility for "B", they might reply:

```
{{
    "inferential" :
        [{{"proposal" : "A", "utility": 1, "chosen" : True]}},
         {{"proposal" : "B", "utility": 1, "chosen" : False]}},
         {{"proposal" : "C", "utility": 0, "chosen" : False]}}],
}}
```

4. Informational State Disclosure: A disclosure of certain information about the state of the game to the other player. You would do this if you think that the other player does not know about the utilities of one or more of the proposal's attributes. For each piece of information disclosed, indicate the proposal (str) and attribute (str) as well as the disclosed utility value (int). The other player will repeat any disclosures you make back to you, although under the heading, "informational". For example, if you want to tell the other player that "proposal A increases x and proposal C decreases y" you would return:

```
{{
    "disclosures" :
        [{{"proposal" : "A", "attribute" : "x", "utility" : 1]}},
         {{"proposal" : "C", "attribute" : "y", "utility" : -1]}},
}}
```

Format your response as a JSON dict like so (omitting the ```). Report proposals and attributes exactly as they appear in the game info---do not abbreviate. (proposals may not be "A", "B", and "C". Attributes may not be "x", "y", and "z".) If you do not want to appeal to nor disclose any information, return an empty list. You may take all four action types simultaneously as well as any combination of them.

```
{{
    "motivational" :
    [       "<attribute name>", ],
    "informational" :
    [       {{"proposal" : "<proposal name>", "attribute" : "<attribute name>"}}, ],
    "inferential" :
    [       "<proposal name>",  ],
    "disclosures" :
    [       {{"proposal" : "<proposal name>", "attribute" : "<attribute name>", "utility" : <utility>}},    ],
}}
```)PROMPT";

inline constexpr std::string_view kHintPrompt = R"PROMPT(### Hint

On each turn, you might disclose of certain information about the state of the game to the other player. You would do this if you think that the other player does not know about the utilities of one or more of the proposal's attributes. The other player will repeat any disclosures you make back to you. For example, you might want to tell the other player that "proposal A increases x and proposal C decreases y." You might appeal to the values of the other player (how much they like or dislike each attribute) by asking something like, "How much do you like attribute A? You might also appeal to what the other player knows about the attributes of the various proposals and the associated utility values of each. For example, "What is all that you know about proposal A? Alternatively, you might ask questions like "What is your preferred proposal?"

Assume that you will receive truthful responses.)PROMPT";

/// Substitutes "{name}" placeholders and collapses "{{" and "}}".
inline std::string fill_template(std::string_view tmpl,
                                 const std::map<std::string, std::string, std::less<>>& fields = {}) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if ((c == '{' || c == '}') && i + 1 < tmpl.size() && tmpl[i + 1] == c) {
      out += c;
      ++i;
      continue;
    }
    if (c == '{') {
      const auto close = tmpl.find('}', i);
      if (close == std::string_view::npos)
        throw Error(ErrorCode::kInvalidArgument, "unterminated placeholder");
      const auto name = tmpl.substr(i + 1, close - i - 1);
      const auto it = fields.find(name);
      if (it == fields.end())
        throw Error(ErrorCode::kInvalidArgument, "no value for placeholder '" + std::string(name) + "'");
      out += it->second;
      i = close;
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace mindgames
