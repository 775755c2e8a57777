"""
Random Streams
==============
זרמי מספרים אקראיים הניתנים לשחזור.

כל פעולה סטוכסטית מקבלת seed מפורש או Generator. הגנרטור הוא Philox
(counter-based), וזרמי-בת נגזרים מ-SeedSequence עם spawn_key כך שניסוי t
בנקודה a ניתן לשחזור בבידוד.
"""

from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """בנה Generator מ-seed, SeedSequence או Generator קיים"""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def child_sequence(master_seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence של צומת (axis point, trial, ...) מתחת ל-master seed"""
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))


def split(seed: SeedLike, count: int) -> Sequence[np.random.Generator]:
    """
    פצל seed ל-count זרמים בלתי תלויים

    עבור int או SeedSequence הפיצול דטרמיניסטי ולא משנה את הקלט
    (spawn_key מורחב באינדקס), כך שקריאה חוזרת מחזירה אותם זרמים.
    """
    if isinstance(seed, np.random.Generator):
        return list(seed.spawn(count))
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return [
        np.random.Generator(np.random.Philox(np.random.SeedSequence(
            entropy=sequence.entropy,
            spawn_key=tuple(sequence.spawn_key) + (index,),
        )))
        for index in range(count)
    ]
