"""Regenerates chrf_golden.jsonl from sacreBLEU 2.4.2 (pip install sacrebleu==2.4.2)."""
import json
from sacrebleu.metrics import CHRF

PAIRS = [
    ("the cat", "the cat sat"),
    ("the cat sat", "the cat"),
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("abc", "xyz"),
    ("hello world", "hello world!"),
    ("Hello, world!", "hello world"),
    ("I can't believe you did that.", "i cant believe you did that"),
    ("what are you doing here", "what are you doing"),
    ("Oh my god, that's wonderful!", "oh my god that's wonderful"),
    ("no", "No."),
    ("yes", "yeah"),
    ("a", "a"),
    ("a", "b"),
    ("aoeu33", "axeu33"),
    ("Recent offers of evacuating residents from the Syrian regime and Russia sound like only thinly veiled threats, pediatricians, surgeons and other doctors have said.",
     "Recent offers of evacuation form the regime and Russia had sounded like thinly-veiled threats, said the surgeons paediatricians and other doctors."),
    ("I don't know what you want from me.", "I don't know what you want for me"),
    ("Why would you say that?", "why would you say that"),
    ("Get out of here!", "get out of here"),
    ("It's fine. It's fine.", "it's fine it's fine"),
    ("I'm so sorry for your loss.", "I'm sorry for your loss"),
    ("The flight was cancelled again", "the flight was canceled again"),
    ("You never listen to me", "you never listened to me"),
    ("Well, I guess that's it then.", "well i guess that's it then"),
    ("Are you kidding me?!", "are you kidding me"),
    ("hmm", "mm"),
    ("uh huh", "uh-huh"),
    ("Thank you. Thank you so much.", "thank you thank you so much"),
    ("(laughs) okay", "okay"),
    ("I love you", "I love you too"),
    ("we're getting married", "we are getting married"),
    ("She left. She just left.", "she left she just left"),
    ("Don't touch me!", "don't touch me"),
    ("What? What did you say?", "what what did you say"),
    ("There's nothing I can do about it.", "there is nothing i can do about it"),
    ("The cat, the dog, the bird.", "the cat the dog the bird"),
    ("$100 - 5%!", "100 dollars minus five percent"),
    ("a b c d e f g", "g f e d c b a"),
    ("aaaaaaa", "aaaa"),
    ("ab ab ab", "ab"),
    ("résumé café", "resume cafe"),
    ("naïve façade", "naïve façade"),
    ("Yeah, yeah, yeah.", "yeah"),
    ("x", "xyzzy"),
    ("the quick brown fox jumps over the lazy dog", "a quick brown dog jumps over the lazy fox"),
    ("I told you; I told you!", "i told you i told you"),
    ("this is: a test.", "this is a test"),
    ("Honestly - I don't care & never did", "honestly i don't care and never did"),
    ("hi", "hi there how are you doing today"),
    ("hi there how are you doing today", "hi"),
    ("", "something"),
    ("something", ""),
    ("   spaced    out   ", "spaced out"),
    ("tab\tseparated", "tab separated"),
    ("one two three four five", "one two three four five six"),
    ("!!", "!"),
    ("'quoted'", "quoted"),
]

chrf = CHRF()
chrf_pp = CHRF(word_order=2)
with open("chrf_golden.jsonl", "w") as out:
    for hyp, ref in PAIRS:
        rec = {
            "hyp": hyp,
            "ref": ref,
            "chrf": chrf.sentence_score(hyp, [ref]).score,
            "chrf_pp": chrf_pp.sentence_score(hyp, [ref]).score,
        }
        out.write(json.dumps(rec, ensure_ascii=False) + "\n")
print(len(PAIRS), "pairs")
