from datetime import datetime
from enum import Enum

from stablesim import db


# Kinds of subordinating SSSI process
class SubordinatorKind(Enum):
    FBM = 'fbm'                  # fractional Brownian motion, exponent H'
    STABLE_LEVY = 'stable_levy'  # symmetric beta-stable Levy motion, H' = 1/beta


# Kernels of the doubly stochastic stable integral
class KernelVariant(Enum):
    INDICATOR = 'indicator'                   # 1_[0, A_t](x)
    SIGNED_INDICATOR = 'signed_indicator'     # sign(A_t) 1_[0, A_t](x)
    LOCAL_TIME = 'local_time'                 # L_A(t, x)
    LEVY_DETERMINISTIC = 'levy_deterministic' # 1_[0, t](x), no path dependence

    @property
    def is_step(self):
        """Step kernels take values in {-1, 0, 1} and are integrated by interval geometry"""
        return self is not KernelVariant.LOCAL_TIME


# Processes a run config can ask for
class ProcessKind(Enum):
    IFSM = 'ifsm'
    LTFSM = 'ltfsm'
    LEVY = 'levy'

    @property
    def kernel(self):
        return {
            ProcessKind.IFSM: KernelVariant.INDICATOR,
            ProcessKind.LTFSM: KernelVariant.LOCAL_TIME,
            ProcessKind.LEVY: KernelVariant.LEVY_DETERMINISTIC,
        }[self]


# Experiments, declared in canonical execution order
class Experiment(Enum):
    FEASIBILITY = 'feasibility'
    SELFSIM = 'selfsim'
    STATIONARITY = 'stationarity'
    SIGNKERNEL = 'signkernel'
    CHARMATCH = 'charmatch'
    REFINEMENT = 'refinement'
    LEVYREDUCTION = 'levyreduction'
    GAUSSIANCOV = 'gaussiancov'
    MIXING = 'mixing'
    CONSERVATIVITY = 'conservativity'
    EXTREME = 'extreme'
    CLASSIFICATION = 'classification'

    @property
    def order(self):
        return list(Experiment).index(self)

    @property
    def dependencies(self):
        if self is Experiment.CLASSIFICATION:
            return (Experiment.MIXING, Experiment.CONSERVATIVITY)
        return ()


# Index of the binary cache: one row per envelope file on disk
class CacheEntry(db.Model):
    __tablename__ = 'cache_entries'

    id = db.Column(db.Integer, primary_key=True)
    key_hash = db.Column(db.String(64), unique=True, index=True, nullable=False)
    kind = db.Column(db.String(32), nullable=False)      # 'ensemble' or 'noise_field'
    seed = db.Column(db.String(24), nullable=False)      # u64 does not fit a signed SQLite integer
    alpha = db.Column(db.Float)
    n_paths = db.Column(db.Integer, nullable=False)
    grid = db.Column(db.Text, nullable=False)
    file_path = db.Column(db.String(512), nullable=False)
    n_bytes = db.Column(db.Integer, default=0)
    hit_count = db.Column(db.Integer, default=0, nullable=False)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)
    last_hit_at = db.Column(db.DateTime)

    def record_hit(self):
        self.hit_count = (self.hit_count or 0) + 1
        self.last_hit_at = datetime.utcnow()

    def __repr__(self):
        return f'<CacheEntry {self.kind} {self.key_hash[:12]}>'


# Ledger of verification runs
class RunRecord(db.Model):
    __tablename__ = 'run_records'

    id = db.Column(db.Integer, primary_key=True)
    config_hash = db.Column(db.String(64), index=True, nullable=False)
    seed = db.Column(db.String(24), nullable=False)
    process = db.Column(db.String(16), nullable=False)
    alpha = db.Column(db.Float, nullable=False)
    passed = db.Column(db.Boolean(), nullable=False)
    wall_time = db.Column(db.Float, nullable=False)
    cache_hits = db.Column(db.Integer, default=0, nullable=False)
    out_dir = db.Column(db.String(512))
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    def __repr__(self):
        verdict = 'PASS' if self.passed else 'FAIL'
        return f'<RunRecord {self.process} alpha={self.alpha} {verdict}>'
