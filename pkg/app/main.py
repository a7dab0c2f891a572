from fastapi import FastAPI
from app.core.logging import configure_logging
from app.db import Base, engine
from app.routes import experiments, runs, tableaux

configure_logging()

# Создание таблицы в базе данных
Base.metadata.create_all(bind=engine)

app = FastAPI(title="Bumping Routes API")

# Подключение маршрутов
app.include_router(experiments.router)
app.include_router(runs.router)
app.include_router(tableaux.router)

@app.get("/")
def read_root():
    return {"message": "Welcome to Bumping Routes API"}
