from pydantic import BaseModel
from dotenv import load_dotenv
import os

load_dotenv()

class Settings(BaseModel):
    # Tolerancias numéricas
    eta_tol: float = float(os.getenv("ETA_TOL", "1e-10"))
    eta_max_iter: int = int(os.getenv("ETA_MAX_ITER", "1000000"))
    eta_stall_ratio: float = float(os.getenv("ETA_STALL_RATIO", "0.9999"))
    eta_bracket_after: int = int(os.getenv("ETA_BRACKET_AFTER", "2000"))
    quad_abs_tol: float = float(os.getenv("QUAD_ABS_TOL", "1e-12"))
    truncate_cap: int = int(os.getenv("TRUNCATE_CAP", "1000000"))
    tail_tol: float = float(os.getenv("TAIL_TOL", "1e-10"))
    order_tol: float = float(os.getenv("ORDER_TOL", "1e-10"))
    lt_grid: int = int(os.getenv("LT_GRID", "1001"))

    # Ejecución
    workers: int = int(os.getenv("WORKERS", "1"))
    default_seed: int = int(os.getenv("DEFAULT_SEED", "1"))
    log_level: str = os.getenv("LOG_LEVEL", "WARNING")
    csv_digits: int = int(os.getenv("CSV_DIGITS", "6"))

settings = Settings()
