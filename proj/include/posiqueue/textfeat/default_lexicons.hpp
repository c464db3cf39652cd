#pragma once

// Shipped open lexicons. Identical copies live in data/lexicons/*.tsv for
// operators who want to edit them; tests keep the two in sync.

namespace posiqueue::textfeat::defaults {

// category<TAB>word ; a trailing '*' marks a stem (prefix match)
inline constexpr const char* kCategories = R"(# category	word
positive_emotion	good
positive_emotion	great
positive_emotion	love*
positive_emotion	nice
positive_emotion	thank*
positive_emotion	happy
positive_emotion	helpful
positive_emotion	awesome
positive_emotion	excellent
positive_emotion	wonderful
positive_emotion	amazing
positive_emotion	beautiful
positive_emotion	glad
positive_emotion	enjoy*
positive_emotion	appreciat*
positive_emotion	best
positive_emotion	kind
positive_emotion	fun
positive_emotion	brilliant
positive_emotion	fantastic
positive_emotion	perfect
positive_emotion	interesting
positive_emotion	insightful
positive_emotion	welcom*
positive_emotion	inspiring
positive_emotion	thoughtful
negative_emotion	bad
negative_emotion	hate*
negative_emotion	awful
negative_emotion	terrible
negative_emotion	angry
negative_emotion	sad
negative_emotion	worst
negative_emotion	horrible
negative_emotion	annoy*
negative_emotion	stupid
negative_emotion	ugly
negative_emotion	hurt*
negative_emotion	fear*
negative_emotion	wrong
negative_emotion	boring
negative_emotion	disgust*
negative_emotion	upset
negative_emotion	fail*
negative_emotion	pathetic
negative_emotion	useless
affect	good
affect	great
affect	love*
affect	nice
affect	thank*
affect	happy
affect	helpful
affect	awesome
affect	excellent
affect	wonderful
affect	amazing
affect	beautiful
affect	glad
affect	enjoy*
affect	appreciat*
affect	best
affect	kind
affect	fun
affect	brilliant
affect	fantastic
affect	perfect
affect	interesting
affect	insightful
affect	welcom*
affect	inspiring
affect	thoughtful
affect	bad
affect	hate*
affect	awful
affect	terrible
affect	angry
affect	sad
affect	worst
affect	horrible
affect	annoy*
affect	stupid
affect	ugly
affect	hurt*
affect	fear*
affect	wrong
affect	boring
affect	disgust*
affect	upset
affect	fail*
affect	pathetic
affect	useless
cognitive_processes	think
cognitive_processes	know
cognitive_processes	because
cognitive_processes	reason*
cognitive_processes	understand*
cognitive_processes	consider*
cognitive_processes	cause*
cognitive_processes	maybe
cognitive_processes	perhaps
cognitive_processes	should
cognitive_processes	would
cognitive_processes	could
cognitive_processes	question*
cognitive_processes	realiz*
cognitive_processes	mean
cognitive_processes	believe*
cognitive_processes	guess
cognitive_processes	wonder*
function_words	the
function_words	a
function_words	an
function_words	and
function_words	or
function_words	but
function_words	of
function_words	to
function_words	in
function_words	on
function_words	at
function_words	for
function_words	with
function_words	is
function_words	are
function_words	was
function_words	were
function_words	it
function_words	this
function_words	that
function_words	i
function_words	you
function_words	he
function_words	she
function_words	we
function_words	they
function_words	not
function_words	no
function_words	be
function_words	have
function_words	has
function_words	so
function_words	if
function_words	as
function_words	by
function_words	from
social	friend*
social	family
social	people
social	talk*
social	share*
social	community
social	we
social	us
social	our
social	they
social	you
social	together
social	member*
social	team
social	help*
social	everyone
certainty	always
certainty	never
certainty	definitely
certainty	certain*
certainty	sure
certainty	absolutely
certainty	clearly
certainty	obvious*
certainty	undoubt*
certainty	completely
certainty	totally
certainty	every
informal	lol
informal	lmao
informal	omg
informal	yeah
informal	nah
informal	gonna
informal	wanna
informal	btw
informal	tbh
informal	imo
informal	haha*
informal	ok
informal	okay
informal	wtf
informal	yep
informal	nope
informal	dude
)";

// word<TAB>valence in [-4, 4]
inline constexpr const char* kValence = R"(# word	valence
good	1.9
great	3.1
love	3.2
loved	2.9
lovely	2.8
nice	1.8
thanks	1.9
thank	1.5
happy	2.7
helpful	1.8
awesome	3.1
excellent	2.7
wonderful	2.7
amazing	2.8
beautiful	2.9
glad	2.0
enjoy	2.2
enjoyed	2.3
appreciate	1.7
appreciated	2.3
best	3.2
kind	2.4
fun	2.3
brilliant	2.8
fantastic	2.6
perfect	2.7
interesting	1.7
insightful	2.2
welcome	2.0
inspiring	2.6
thoughtful	1.6
clear	1.6
useful	1.9
bad	-2.5
hate	-2.7
awful	-2.0
terrible	-2.1
angry	-2.3
sad	-2.1
worst	-3.1
horrible	-2.5
annoying	-1.7
stupid	-2.4
ugly	-2.3
hurt	-2.4
fear	-2.2
wrong	-2.1
boring	-1.3
disgusting	-2.4
upset	-1.6
fail	-2.5
failed	-2.3
pathetic	-2.7
useless	-1.8
idiot	-2.3
trash	-1.6
garbage	-1.6
sucks	-1.5
)";

// word<TAB>weight in (0, 1]
inline constexpr const char* kToxicity = R"(# word	weight
idiot	0.8
idiots	0.8
moron	0.8
stupid	0.6
dumb	0.5
loser	0.6
pathetic	0.5
trash	0.4
garbage	0.4
scum	0.7
worthless	0.6
jerk	0.5
hate	0.4
kill	0.6
die	0.5
shut	0.3
crap	0.4
damn	0.3
hell	0.2
wtf	0.4
suck	0.4
sucks	0.4
ass	0.5
bastard	0.8
bitch	0.9
shit	0.7
fuck	0.9
fucking	0.9
)";

// strategy<TAB>polarity<TAB>phrase ; a leading '^' anchors the phrase at
// the start of a sentence
inline constexpr const char* kPoliteness = R"(# strategy	polarity	phrase
gratitude	1	thank you
gratitude	1	thanks
gratitude	1	thank
gratitude	1	appreciate
gratitude	1	appreciated
gratitude	1	grateful
greeting	1	^hi
greeting	1	^hello
greeting	1	^hey
greeting	1	^greetings
greeting	1	^good morning
please	1	please
apology	1	sorry
apology	1	apologize
apology	1	apologies
apology	1	my bad
apology	1	excuse me
hedges	1	i think
hedges	1	i guess
hedges	1	maybe
hedges	1	perhaps
hedges	1	possibly
hedges	1	probably
hedges	1	might
direct_command	-1	^do
direct_command	-1	^don't
direct_command	-1	^stop
direct_command	-1	^just
direct_command	-1	^give
direct_command	-1	^tell
direct_command	-1	^go
direct_command	-1	^read
profanity_adjacent	-1	damn
profanity_adjacent	-1	hell
profanity_adjacent	-1	crap
profanity_adjacent	-1	wtf
profanity_adjacent	-1	screw
profanity_adjacent	-1	freaking
second_person_start	-1	^you
second_person_start	-1	^your
)";

}  // namespace posiqueue::textfeat::defaults
