from .server import serve_oracle
from .training import ServedTeacher, TeacherSpec, train_teacher

__version__ = "0.1.0"
