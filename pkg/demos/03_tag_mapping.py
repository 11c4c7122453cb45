"""Mapping a historical tag inventory onto the modern one.

The parser is trained on modern-German-style tags, so historical tags
must be mapped onto that inventory before parsing.  Unknown symbols pass
through unchanged rather than halting the pipeline.
"""

from delexparse import ExtendedTag, TaggedSentence, default_table, map_extended_tag, map_sentence

table = default_table()
print("bundled pairs:")
for source, target in sorted(table.pos_map.items()):
    print(f"  {source:6s} -> {target.serialized()}")

# Morphological features ride along unchanged by default.
print(map_extended_tag(ExtendedTag.parse("DDART.Nom.Sg.Fem"), table).serialized())

# When the target side itself carries features, they are prepended.
print(map_extended_tag(ExtendedTag.parse("VAPS.Nom"), table).serialized())

# Composite tags (two tags joined by |) keep only their first part.
print(map_extended_tag(ExtendedTag("APPR|NA"), table).serialized())

# Tags already in the modern inventory are untouched, so mapping twice
# is the same as mapping once.
sentence = TaggedSentence(
    ("diu", "frouwe", "lachet"),
    (ExtendedTag.parse("DDART.Nom.Sg.Fem"),
     ExtendedTag.parse("NA.Nom.Sg.Fem"),
     ExtendedTag.parse("VVFIN")))
once = map_sentence(sentence, table)
twice = map_sentence(once, table)
print("mapped:", [t.serialized() for t in once.tags])
print("idempotent:", once == twice)
