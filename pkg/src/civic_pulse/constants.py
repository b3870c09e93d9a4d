"""Frozen constants of the VADER-style scoring rules and the label thresholds.

Values follow the published reference implementation of VADER (Hutto &
Gilbert, 2014). Changing any of them breaks parity with reference scores.
"""

# booster / dampener step applied to the following sentiment word
BOOSTER_INCREMENT = 0.293
# extra intensity for an ALL-CAPS word inside otherwise mixed-case text
CAPS_INCREMENT = 0.733
# multiplier applied to a negated word's valence
NEGATION_SCALAR = -0.74
# boosters two and three words back are dampened by these factors
BOOSTER_DECAY = {1: 1.0, 2: 0.95, 3: 0.9}
# "never so good" / "never this good"
NEVER_SO_SCALAR = 1.25

BUT_BEFORE_WEIGHT = 0.5
BUT_AFTER_WEIGHT = 1.5

EXCLAMATION_INCREMENT = 0.292
EXCLAMATION_MAX = 4
QUESTION_INCREMENT = 0.18
QUESTION_CAP = 0.96

# normalization S / sqrt(S^2 + alpha)
NORMALIZATION_ALPHA = 15.0

VALENCE_LIMIT = 4.0
BOOSTER_LIMIT = 0.5

NEGATIVE_THRESHOLD = -0.05
POSITIVE_THRESHOLD = 0.05
